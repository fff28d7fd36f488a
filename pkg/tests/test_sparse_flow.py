import itertools

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from randsplit import sparse_flow
from randsplit.errors import DivergenceError, InputError
from randsplit.switching import SwitchConfig, SwitchSchedule, sample_schedule


def lasso_enumeration_oracle(problem):
    """Complete sign-pattern enumeration: solve each support's KKT system,
    keep the feasible pattern with the smallest target value."""
    n = problem.dim
    best, best_val = None, np.inf
    for pattern in itertools.product((-1.0, 0.0, 1.0), repeat=n):
        s = np.array(pattern)
        support = s != 0
        theta = np.zeros(n)
        if support.any():
            sub = problem.normal_op[np.ix_(support, support)]
            rhs = problem.normal_rhs[support] - s[support]
            theta_s = np.linalg.solve(sub, rhs)
            if np.any(np.sign(theta_s) != s[support]):
                continue
            theta[support] = theta_s
        grad = problem.normal_op @ theta - problem.normal_rhs
        if np.any(np.abs(grad[~support]) > 1.0 + 1e-9):
            continue
        val = sparse_flow.potential(problem, theta)
        if val < best_val:
            best, best_val = theta, val
    return best


class TestProblemConstruction:
    def test_normal_operators(self, random_sparse_6d):
        p = random_sparse_6d
        assert np.max(np.abs(p.normal_op - p.design.T @ p.design)) <= 1e-12 * np.max(np.abs(p.normal_op))
        np.testing.assert_allclose(p.normal_rhs, p.design.T @ p.data, atol=1e-12)
        np.testing.assert_allclose(p.normal_op @ p.unreg_min, p.normal_rhs, atol=1e-9)
        assert p.sigma_min > 0
        np.testing.assert_allclose(p.sigma_min, np.linalg.svd(p.design, compute_uv=False)[-1],
                                   rtol=1e-10)

    def test_rank_deficient_rejected(self):
        with pytest.raises(InputError):
            sparse_flow.SparseProblem.from_design([[1.0, 1.0], [2.0, 2.0], [0.0, 0.0]],
                                                  [1.0, 2.0, 0.0])

    def test_csv_roundtrip(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("1.0,0.0\n0.0,2.0\n1.0,1.0\n")
        b.write_text("1.0\n2.0\n0.5\n")
        p = sparse_flow.SparseProblem.from_csv(a, b)
        assert p.dim == 2 and p.design.shape == (3, 2)


class TestPotential:
    def test_hand_values_scalar_example(self, canonical):
        assert sparse_flow.potential(canonical, [3.0]) == pytest.approx(3.5, abs=1e-15)
        assert sparse_flow.potential(canonical, [0.0]) == pytest.approx(8.0, abs=1e-15)

    def test_zero_data_zero_argument(self):
        p = sparse_flow.SparseProblem.from_design([[2.0]], [0.0])
        assert sparse_flow.potential(p, p.unreg_min) == 0.0

    def test_dimension_mismatch(self, canonical):
        with pytest.raises(InputError):
            sparse_flow.potential(canonical, [1.0, 2.0])


class TestDataSubflow:
    def test_stationary_at_unregularized_minimizer(self, random_sparse_6d):
        p = random_sparse_6d
        for t in (0.0, 0.5, 3.0):
            np.testing.assert_allclose(sparse_flow.data_subflow(p, p.unreg_min, t),
                                       p.unreg_min, atol=1e-10)

    def test_scalar_closed_form_and_ode_oracle(self, canonical):
        got = sparse_flow.data_subflow(canonical, [0.0], np.log(2.0))
        assert got[0] == pytest.approx(2.0, abs=1e-12)
        sol = solve_ivp(lambda t, y: -(y - 4.0), (0.0, np.log(2.0)), [0.0],
                        rtol=1e-12, atol=1e-14)
        assert got[0] == pytest.approx(sol.y[0, -1], abs=1e-9)

    def test_contraction_factor_along_minimal_eigendirection(self, random_sparse_6d):
        p = random_sparse_6d
        vmin = p.flow_cache.eigenvectors[:, 0]
        x = np.zeros(p.dim)
        y = 0.7 * vmin
        num = np.linalg.norm(sparse_flow.data_subflow(p, x, 1.0)
                             - sparse_flow.data_subflow(p, y, 1.0))
        assert num / np.linalg.norm(x - y) == pytest.approx(np.exp(-p.sigma_min**2),
                                                            abs=1e-9)

    def test_contraction_bound_random_pairs(self, random_sparse_6d):
        p = random_sparse_6d
        rng = np.random.default_rng(11)
        for t in (0.5, 1.0, 2.0):
            factor = np.exp(-p.sigma_min**2 * t)
            for _ in range(25):
                x, y = rng.standard_normal((2, p.dim)) * 3
                d = np.linalg.norm(sparse_flow.data_subflow(p, x, t)
                                   - sparse_flow.data_subflow(p, y, t))
                assert d <= factor * np.linalg.norm(x - y) + 1e-10


class TestL1Subflow:
    def test_origin_stationary(self):
        for t in (0.0, 1.0, 100.0):
            np.testing.assert_array_equal(sparse_flow.l1_subflow(np.zeros(4), t), np.zeros(4))

    def test_formula(self):
        np.testing.assert_array_equal(sparse_flow.l1_subflow([3.0, -1.0], 1.0), [2.0, 0.0])

    def test_finite_time_absorption_exact(self):
        rng = np.random.default_rng(13)
        z0 = rng.uniform(-5.0, 5.0, size=12)
        assert np.all(sparse_flow.l1_subflow(z0, 5.0) == 0.0)
        assert np.all(sparse_flow.l1_subflow(z0, float(np.max(np.abs(z0)))) == 0.0)

    def test_non_expansive_in_initial_values(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            x, y = rng.uniform(-4, 4, size=(2, 6))
            t = rng.uniform(0, 3)
            assert (np.linalg.norm(sparse_flow.l1_subflow(x, t) - sparse_flow.l1_subflow(y, t))
                    <= np.linalg.norm(x - y) + 1e-12)


class TestSimulateStochastic:
    def test_two_event_composition(self, canonical):
        schedule = SwitchSchedule(0, np.array([0.5, 0.3]), 0.8)
        sample = sparse_flow.simulate_stochastic(canonical, [0.0], schedule,
                                                 np.array([0.5, 0.8]))
        after_data = 4.0 * (1.0 - np.exp(-0.5))
        assert sample.states[0, 0] == pytest.approx(after_data, abs=1e-14)
        assert sample.states[1, 0] == pytest.approx(after_data - 0.3, abs=1e-14)
        assert sample.states[1, 0] == pytest.approx(1.2738773611494663, abs=1e-13)

    def test_single_regime_reduces_to_data_subflow(self, random_sparse_6d):
        p = random_sparse_6d
        schedule = SwitchSchedule(0, np.array([7.0]), 6.0)
        grid = np.array([1.0, 3.0, 6.0])
        z0 = np.linspace(-1, 1, p.dim)
        sample = sparse_flow.simulate_stochastic(p, z0, schedule, grid)
        for row, t in zip(sample.states, grid):
            np.testing.assert_allclose(row, sparse_flow.data_subflow(p, z0, t), atol=1e-12)

    def test_vector_composition_matches_manual(self, random_sparse_6d):
        p = random_sparse_6d
        schedule = SwitchSchedule(1, np.array([0.4, 0.9, 0.2]), 1.5)
        z0 = np.full(p.dim, 1.3)
        sample = sparse_flow.simulate_stochastic(p, z0, schedule, np.array([1.5]))
        manual = sparse_flow.l1_subflow(z0, 0.4)
        manual = sparse_flow.data_subflow(p, manual, 0.9)
        manual = sparse_flow.l1_subflow(manual, 0.2)
        np.testing.assert_allclose(sample.states[0], manual, atol=1e-12)

    def test_grid_beyond_horizon_rejected(self, canonical):
        schedule = SwitchSchedule(0, np.array([1.0]), 1.0)
        with pytest.raises(InputError):
            sparse_flow.simulate_stochastic(canonical, [0.0], schedule, np.array([2.0]))

    def test_regimes_recorded(self, canonical):
        schedule = SwitchSchedule(0, np.array([1.0, 1.0]), 2.0)
        sample = sparse_flow.simulate_stochastic(canonical, [0.0], schedule,
                                                 np.array([0.5, 1.5, 2.0]))
        assert sample.regimes.tolist() == [0, 1, 1]

    def test_boundedness_scalar_100_seeds(self, canonical):
        bound = max(0.0, abs(canonical.unreg_min[0]) + abs(0.0 - canonical.unreg_min[0]))
        grid = np.linspace(0.0, 100.0, 501)
        for k in range(100):
            sched = sample_schedule(SwitchConfig(2.0, seed=(777, k)), 100.0)
            sample = sparse_flow.simulate_stochastic(canonical, [0.0], sched, grid)
            assert np.max(np.abs(sample.states)) <= bound + 1e-12

    def test_boundedness_vector(self, random_sparse_6d):
        p = random_sparse_6d
        rng = np.random.default_rng(15)
        z0 = rng.standard_normal(p.dim)
        bound = max(np.linalg.norm(z0),
                    np.linalg.norm(p.unreg_min) + np.linalg.norm(z0 - p.unreg_min))
        grid = np.linspace(0.0, 50.0, 201)
        for k in range(25):
            sched = sample_schedule(SwitchConfig(3.0, seed=(778, k)), 50.0)
            sample = sparse_flow.simulate_stochastic(p, z0, sched, grid)
            assert np.max(np.linalg.norm(sample.states, axis=1)) <= bound + 1e-10


class TestDeterministicFlow:
    def test_scalar_analytic_solution(self, canonical):
        grid = np.array([1.0, 2.0, 4.0])
        sample = sparse_flow.deterministic_flow(canonical, [0.0], grid, step=1e-4)
        for value, t in zip(sample.states[:, 0], grid):
            assert value == pytest.approx(3.0 * (1.0 - np.exp(-t / 2.0)), abs=1e-3)

    def test_fixed_point_constant_path(self, canonical):
        sample = sparse_flow.deterministic_flow(canonical, [3.0], np.array([1.0, 5.0]), 1e-3)
        np.testing.assert_allclose(sample.states, 3.0, atol=1e-12)

    def test_limit_matches_forward_backward(self, random_sparse_6d):
        p = random_sparse_6d
        minimizer = sparse_flow.forward_backward(p, np.zeros(p.dim), 0.05, 20_000, tol=1e-12)
        sample = sparse_flow.deterministic_flow(p, np.zeros(p.dim), np.array([40.0]), 1e-3)
        np.testing.assert_allclose(sample.states[-1], minimizer, atol=1e-3)

    def test_target_non_increasing(self, random_sparse_6d):
        p = random_sparse_6d
        step = 1e-3
        grid = np.linspace(0.05, 10.0, 200)
        sample = sparse_flow.deterministic_flow(p, np.full(p.dim, 2.0), grid, step)
        values = [sparse_flow.potential(p, s) for s in sample.states]
        assert np.all(np.diff(values) <= 10.0 * step)
        assert values[-1] <= values[0]

    def test_sticking_at_zero(self):
        # data pull inside [-1, 1] keeps the origin fixed
        p = sparse_flow.SparseProblem.from_design([[1.0]], [0.5])
        sample = sparse_flow.deterministic_flow(p, [0.0], np.array([1.0]), 1e-3)
        assert sample.states[0, 0] == 0.0

    def test_crossing_clamps_to_zero(self):
        p = sparse_flow.SparseProblem.from_design([[1.0]], [0.5])
        # from above, the flow drains to 0 and then sticks there exactly
        sample = sparse_flow.deterministic_flow(p, [0.3], np.array([2.0]), 1e-2)
        assert sample.states[0, 0] == 0.0

    def test_step_validation(self, canonical):
        with pytest.raises(InputError):
            sparse_flow.deterministic_flow(canonical, [0.0], np.array([1.0]), 0.0)


class TestForwardBackward:
    def test_one_exact_step_reaches_stationary_point(self, canonical):
        out = sparse_flow.forward_backward(canonical, [0.0], 1.0, 1)
        assert out[0] == 3.0

    def test_converges_to_three_with_generic_steps(self, canonical):
        out = sparse_flow.forward_backward(canonical, [0.0], 0.5, 200)
        assert abs(out[0] - 3.0) <= 1e-8
        assert sparse_flow.stationarity_gap(canonical, out) <= 1e-8

    def test_zero_data_gives_origin(self):
        p = sparse_flow.SparseProblem.from_design(np.diag([1.0, 2.0]), [0.0, 0.0])
        out = sparse_flow.forward_backward(p, [0.7, -0.4], 0.2, 500)
        np.testing.assert_array_equal(out, 0.0)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_enumeration_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        p = sparse_flow.SparseProblem.from_design(rng.standard_normal((10, 6)),
                                                  2.0 * rng.standard_normal(10))
        h = 0.9 / p.flow_cache.max_eig
        got = sparse_flow.forward_backward(p, np.zeros(6), h, 50_000, tol=1e-12)
        want = lasso_enumeration_oracle(p)
        np.testing.assert_allclose(got, want, atol=1e-6)

    def test_divergence_detected(self, canonical):
        with pytest.raises(DivergenceError):
            sparse_flow.forward_backward(canonical, [100.0], 3.0, 10_000)

    def test_step_validation(self, canonical):
        with pytest.raises(InputError):
            sparse_flow.forward_backward(canonical, [0.0], [0.5, -0.1], 10)
