"""L1-regularized sparse inversion: exact subflows, switched process, baselines.

The target is ``0.5 ||A x - b||^2 + ||x||_1`` with a full-column-rank design.
Its two halves have exact flows: the data half is an affine decay toward the
unregularized minimizer, the L1 half is soft thresholding in time.  The
switched process composes the two closed forms along a switch schedule; the
deterministic reference follows the averaged one-sided derivative field with
an explicit Euler scheme, and forward-backward splitting provides the
minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import scalar_switched_path
from .errors import DivergenceError, InputError, InvariantError
from .numkit import SpdFlowCache, soft_threshold
from .switching import SwitchSchedule
from .trajectory import TrajectorySample, check_grid, run_switched_flow


@dataclass(frozen=True)
class SparseProblem:
    """Design matrix, data, and the cached normal-equation operators."""

    design: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)
    normal_op: np.ndarray = field(repr=False)
    normal_rhs: np.ndarray = field(repr=False)
    sigma_min: float
    unreg_min: np.ndarray = field(repr=False)
    flow_cache: SpdFlowCache = field(repr=False)

    @classmethod
    def from_design(cls, design, data) -> "SparseProblem":
        design = np.asarray(design, dtype=float)
        data = np.asarray(data, dtype=float)
        if design.ndim != 2:
            raise InputError("design must be a 2D matrix")
        if data.shape != (design.shape[0],):
            raise InputError(
                f"data length {data.shape} does not match design rows {design.shape[0]}"
            )
        normal_op = design.T @ design
        normal_op = 0.5 * (normal_op + normal_op.T)
        normal_rhs = design.T @ data
        cache = SpdFlowCache(normal_op)
        if cache.min_eig <= 1e-12 * max(cache.max_eig, 1.0):
            raise InputError("design matrix must have full column rank")
        unreg_min = cache.solve(normal_rhs)
        for arr in (design, data, normal_rhs, unreg_min):
            arr.setflags(write=False)
        return cls(
            design=design,
            data=data,
            normal_op=cache.matrix,
            normal_rhs=normal_rhs,
            sigma_min=float(np.sqrt(cache.min_eig)),
            unreg_min=unreg_min,
            flow_cache=cache,
        )

    @classmethod
    def from_csv(cls, design_path, data_path) -> "SparseProblem":
        design = np.loadtxt(design_path, delimiter=",", ndmin=2)
        data = np.loadtxt(data_path, delimiter=",", ndmin=1)
        return cls.from_design(design, data)

    @property
    def dim(self) -> int:
        return self.design.shape[1]

    def _check_state(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InputError(f"state has shape {x.shape}, expected ({self.dim},)")
        return x


def canonical_1d() -> SparseProblem:
    """The scalar running example 0.5 (x - 4)^2 + |x| with stationary point 3."""
    return SparseProblem.from_design([[1.0]], [4.0])


def potential(problem: SparseProblem, theta) -> float:
    """Full target 0.5 ||A theta - b||^2 + ||theta||_1."""
    theta = problem._check_state(theta)
    residual = problem.design @ theta - problem.data
    return float(0.5 * residual @ residual + np.abs(theta).sum())


def data_gradient(problem: SparseProblem, theta) -> np.ndarray:
    """Gradient of the smooth half: A^T A theta - A^T b."""
    theta = problem._check_state(theta)
    return problem.normal_op @ theta - problem.normal_rhs


def data_subflow(problem: SparseProblem, z0, t: float) -> np.ndarray:
    """Exact data-half flow: unreg_min + exp(-t A^T A)(z0 - unreg_min).

    Contracts pairs of initial values at rate ``exp(-sigma_min^2 t)``.
    """
    z0 = problem._check_state(z0)
    if not t >= 0:
        raise InputError(f"time must be nonnegative, got {t}")
    return problem.flow_cache.propagate(problem.unreg_min, z0, t)


def l1_subflow(z0, t: float) -> np.ndarray:
    """Exact L1-half flow; equals soft thresholding with threshold ``t``.

    Hits exactly 0 once ``t >= max_i |z0_i|``.
    """
    return soft_threshold(z0, t)


def data_field(problem: SparseProblem, theta) -> np.ndarray:
    """Right-hand side of the data subflow ODE (for generator checks)."""
    return -data_gradient(problem, theta)


def l1_field(theta) -> np.ndarray:
    """One-sided derivative of the L1 subflow away from the kink set."""
    return -np.sign(np.asarray(theta, dtype=float))


def subgradient_field(problem: SparseProblem, theta) -> np.ndarray:
    """One-sided derivative field of the combined flow.

    Away from zero this is -0.5 grad - 0.5 sgn; a coordinate sitting at zero
    sticks when the data pull lies in [-1, 1] and otherwise moves with the
    excess force.
    """
    theta = problem._check_state(theta)
    grad = problem.normal_op @ theta - problem.normal_rhs
    g = np.where(theta < 0, 1.0, -1.0)
    at_zero = theta == 0.0
    if np.any(at_zero):
        pull = -grad[at_zero]
        g_zero = np.where(pull > 1.0, -1.0, np.where(pull < -1.0, 1.0, grad[at_zero]))
        g = g.copy()
        g[at_zero] = g_zero
    return 0.5 * (-grad + g)


def simulate_stochastic(problem: SparseProblem, theta0, schedule: SwitchSchedule,
                        grid) -> TrajectorySample:
    """Switched process: data subflow in regime 0, L1 subflow in regime 1.

    Both subflows are evaluated in closed form at exact event offsets, so the
    recorded states carry no time-stepping error.  Scalar problems route
    through the compiled kernel.
    """
    theta0 = problem._check_state(theta0)
    if problem.dim == 1:
        grid = check_grid(grid, schedule.horizon)
        out_states = np.empty(grid.size)
        out_regimes = np.empty(grid.size, dtype=np.int8)
        scalar_switched_path(
            np.ascontiguousarray(schedule.durations),
            schedule.initial_regime,
            float(problem.normal_op[0, 0]),
            float(problem.unreg_min[0]),
            float(theta0[0]),
            schedule.horizon,
            np.ascontiguousarray(grid),
            out_states,
            out_regimes,
        )
        return TrajectorySample(times=grid, states=out_states[:, None], regimes=out_regimes)
    maps = (
        lambda x, s: problem.flow_cache.propagate(problem.unreg_min, x, s),
        lambda x, s: soft_threshold(x, s),
    )
    return run_switched_flow(schedule, grid, theta0, maps)


def simulate_terminal(problem: SparseProblem, theta0, schedule: SwitchSchedule) -> np.ndarray:
    """State at the schedule horizon only (cheapest path for large ensembles)."""
    sample = simulate_stochastic(problem, theta0, schedule, np.array([schedule.horizon]))
    return sample.states[-1]


def deterministic_flow(problem: SparseProblem, z0, grid, step: float) -> TrajectorySample:
    """Explicit Euler on the averaged one-sided derivative field.

    Coordinates at exactly zero stick while the data pull stays in [-1, 1];
    a coordinate whose Euler update crosses zero is clamped to zero for that
    step.  The target value is non-increasing along the output up to O(step).
    """
    z0 = problem._check_state(z0)
    if not step > 0:
        raise InputError(f"step must be positive, got {step}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise InputError("time grid must be nonempty, nonnegative, strictly increasing")
    state = z0.copy()
    states = np.empty((grid.size, problem.dim))
    t = 0.0
    for gi, t_target in enumerate(grid):
        span = t_target - t
        if span > 0:
            nsub = max(1, int(np.ceil(span / step)))
            h = span / nsub
            for _ in range(nsub):
                new = state + h * subgradient_field(problem, state)
                crossed = state * new < 0.0
                new[crossed] = 0.0
                state = new
            t = t_target
        states[gi] = state
    return TrajectorySample(times=grid, states=states)


def stationarity_gap(problem: SparseProblem, theta) -> float:
    """Worst componentwise violation of 0 in grad + d||.||_1 at ``theta``."""
    theta = problem._check_state(theta)
    grad = problem.normal_op @ theta - problem.normal_rhs
    gap = np.where(
        theta == 0.0,
        np.maximum(np.abs(grad) - 1.0, 0.0),
        np.abs(grad + np.sign(theta)),
    )
    return float(gap.max())


def forward_backward(problem: SparseProblem, z0, steps, iters: int,
                     tol: float | None = None) -> np.ndarray:
    """Forward-backward splitting: gradient step then the L1 proximal map.

    ``steps`` is a scalar step size or a sequence cycled over the iterations.
    With a constant step below ``2 / sigma_max^2`` the iteration converges to
    the unique minimizer.  Raises DivergenceError if the iterate norm passes
    1e12.
    """
    z = problem._check_state(z0).copy()
    if np.isscalar(steps):
        steps = [float(steps)]
    steps = [float(h) for h in steps]
    if not steps or any(h <= 0 for h in steps):
        raise InputError("all step sizes must be positive")
    if iters < 1:
        raise InputError("need at least one iteration")
    for k in range(iters):
        h = steps[k % len(steps)]
        grad = problem.normal_op @ z - problem.normal_rhs
        z = soft_threshold(z - h * grad, h)
        if np.linalg.norm(z) > 1e12:
            raise DivergenceError(f"iterate norm exceeded 1e12 at iteration {k}")
        if tol is not None and stationarity_gap(problem, z) <= tol:
            break
    return z
