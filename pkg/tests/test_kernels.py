import numpy as np

from randsplit import sparse_flow
from randsplit._kernels import _pure, backend, scalar_switched_path
from randsplit.switching import SwitchConfig, sample_schedule
from randsplit.trajectory import run_switched_flow


def _run_both(durations, initial_regime, rate, target, x0, horizon, grid):
    o1 = np.empty(grid.size)
    r1 = np.empty(grid.size, np.int8)
    o2 = np.empty(grid.size)
    r2 = np.empty(grid.size, np.int8)
    t1 = scalar_switched_path(durations, initial_regime, rate, target, x0,
                              horizon, grid, o1, r1)
    t2 = _pure.scalar_switched_path(durations, initial_regime, rate, target, x0,
                                    horizon, grid, o2, r2)
    return (t1, o1, r1), (t2, o2, r2)


def test_backend_reported():
    assert backend() in ("cython", "pure")


def test_backends_bit_identical_across_rates():
    for lam in (0.25, 2.5, 25.0, 250.0):
        for seed in range(8):
            sched = sample_schedule(SwitchConfig(lam, seed=(1000, seed)), 20.0)
            grid = np.linspace(0.0, 20.0, 41)
            a, b = _run_both(sched.durations, 0, 1.0, 4.0, 0.0, 20.0, grid)
            assert a[0] == b[0]
            assert np.array_equal(a[1], b[1])
            assert np.array_equal(a[2], b[2])


def test_backends_bit_identical_with_trailing_events():
    # schedules whose durations overshoot the horizon by several events
    durations = np.array([0.5, 0.4, 0.3, 5.0, 1.0, 1.0])
    grid = np.array([0.0, 0.2, 0.9, 1.19, 1.2, 1.3])
    a, b = _run_both(durations, 1, 2.0, -1.5, 0.7, 1.2, grid)
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])
    assert np.array_equal(a[2], b[2])


def test_empty_grid_terminal_only():
    sched = sample_schedule(SwitchConfig(25.0, seed=(2, 2)), 20.0)
    grid = np.empty(0)
    a, b = _run_both(sched.durations, 0, 1.0, 4.0, 0.0, 20.0, grid)
    assert a[0] == b[0]


def test_scalar_kernel_matches_generic_walker(canonical):
    sched = sample_schedule(SwitchConfig(25.0, seed=(3, 9)), 20.0)
    grid = np.linspace(0.0, 20.0, 81)
    fast = sparse_flow.simulate_stochastic(canonical, [0.0], sched, grid)
    maps = (
        lambda x, s: canonical.flow_cache.propagate(canonical.unreg_min, x, s),
        lambda x, s: sparse_flow.l1_subflow(x, s),
    )
    generic = run_switched_flow(sched, grid, np.zeros(1), maps)
    np.testing.assert_allclose(fast.states, generic.states, atol=1e-12)
    assert np.array_equal(fast.regimes, generic.regimes)
