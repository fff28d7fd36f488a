"""Pure-Python mirror of the compiled scalar PDMP kernel.

Must stay line-for-line equivalent to ``_scalar_pdmp.pyx``: both consume the
same pre-drawn waiting times and must produce bit-identical doubles (libm
``exp`` in both cases), so that results do not depend on which backend was
importable.
"""

from math import exp


def scalar_switched_path(durations, initial_regime, decay_rate, target,
                         state0, horizon, grid, out_states, out_regimes):
    """Walk a scalar two-regime switched flow; returns the state at ``horizon``.

    Regime 0: x(s) = target + (x - target) * exp(-decay_rate * s).
    Regime 1: x(s) = sgn(x) * max(|x| - s, 0).
    States at the (sorted) ``grid`` times are written to ``out_states`` with
    the active regime in ``out_regimes``.
    """
    t = 0.0
    x = float(state0)
    regime = int(initial_regime)
    gi = 0
    ng = len(grid)
    for k in range(len(durations)):
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
                mag = abs(x) - off
                val = 0.0 if mag <= 0.0 else (-mag if x < 0.0 else mag)
            out_states[gi] = val
            out_regimes[gi] = regime
            gi += 1
        if regime == 0:
            x = target + (x - target) * exp(-decay_rate * d)
        else:
            mag = abs(x) - d
            x = 0.0 if mag <= 0.0 else (-mag if x < 0.0 else mag)
        t = t_end
        regime = 1 - regime
    while gi < ng:
        out_states[gi] = x
        out_regimes[gi] = 1 - regime
        gi += 1
    return x
