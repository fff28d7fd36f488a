# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar PDMP kernel; semantics identical to ``_pure.py``."""

from libc.math cimport exp, fabs


def scalar_switched_path(const double[::1] durations, int initial_regime,
                         double decay_rate, double target, double state0,
                         double horizon, const double[::1] grid,
                         double[::1] out_states, signed char[::1] out_regimes):
    cdef double t = 0.0
    cdef double x = state0
    cdef int regime = initial_regime
    cdef Py_ssize_t gi = 0
    cdef Py_ssize_t ng = grid.shape[0]
    cdef Py_ssize_t k
    cdef double rem, d, t_end, off, val, mag
    for k in range(durations.shape[0]):
        rem = horizon - t
        if rem <= 0.0:
            break
        d = durations[k]
        if d > rem:
            d = rem
        t_end = t + d
        while gi < ng and grid[gi] <= t_end:
            off = grid[gi] - t
            if off < 0.0:
                off = 0.0
            if off == 0.0:
                val = x
            elif regime == 0:
                val = target + (x - target) * exp(-decay_rate * off)
            else:
                mag = fabs(x) - off
                val = 0.0 if mag <= 0.0 else (-mag if x < 0.0 else mag)
            out_states[gi] = val
            out_regimes[gi] = <signed char> regime
            gi += 1
        if regime == 0:
            x = target + (x - target) * exp(-decay_rate * d)
        else:
            mag = fabs(x) - d
            x = 0.0 if mag <= 0.0 else (-mag if x < 0.0 else mag)
        t = t_end
        regime = 1 - regime
    while gi < ng:
        out_states[gi] = x
        out_regimes[gi] = <signed char> (1 - regime)
        gi += 1
    return x
