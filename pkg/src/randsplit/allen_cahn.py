"""Discrete Allen-Cahn classification: exact subflows, CN stepping, switched process.

The energy couples a masked quadratic fidelity term, a discrete Dirichlet
term, and a piecewise double-well with wells at -1 and 1.  The linear half
(fidelity + Dirichlet) decays exactly toward its stationary point; the
double-well half has a closed-form coordinatewise solution that repels from
0 and absorbs at the wells.  Above the dense-eigendecomposition limit the
linear half is advanced by single Crank-Nicolson steps instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import ConfigError, InputError, SolverError
from .numkit import DENSE_DIM_LIMIT, SpdFlowCache
from .switching import SwitchSchedule
from .trajectory import TrajectorySample, run_switched_flow


def double_well(x) -> np.ndarray:
    """Piecewise double-well: |x| - 1 outside [-1, 1], (1 - x^2)/2 inside.

    Zero exactly at the wells -1 and 1, nonnegative everywhere.
    """
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) >= 1.0, np.abs(x) - 1.0, 0.5 * (1.0 - x * x))


def stride_mask(n: int, stride: int, offset: int = 0) -> np.ndarray:
    """Observation indices ``offset, offset+stride, ...`` below ``n``."""
    if stride < 1 or not 0 <= offset < n:
        raise InputError(f"invalid stride pattern ({stride=}, {offset=}, {n=})")
    return np.arange(offset, n, stride)


@dataclass(frozen=True)
class ErgodicityReport:
    """Whether the geometric-ergodicity hypothesis mu_min > 1/epsilon holds."""

    mu_min: float
    expansion_rate: float  # 1/epsilon, the double-well expansion exponent
    holds: bool


@dataclass(frozen=True)
class ClassificationProblem:
    """Masked fidelity operator, discrete Laplacian, and cached linear flow."""

    dim: int
    mask: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    alpha: float
    epsilon: float
    laplacian: object = field(repr=False)  # dense ndarray or scipy sparse, shape (dim, dim)
    fidelity_diag: np.ndarray = field(repr=False)
    forcing: np.ndarray = field(repr=False)
    stiffness: object = field(repr=False)  # fidelity_diag - epsilon * laplacian
    mu_min: float
    linear_fixed_point: np.ndarray = field(repr=False)
    flow_cache: SpdFlowCache | None = field(repr=False)

    @classmethod
    def build(cls, mask, labels, alpha: float, epsilon: float, laplacian,
              dense_limit: int = DENSE_DIM_LIMIT) -> "ClassificationProblem":
        if not alpha > 0:
            raise InputError(f"alpha must be positive, got {alpha}")
        if not epsilon > 0:
            raise InputError(f"epsilon must be positive, got {epsilon}")
        sparse_lap = scipy.sparse.issparse(laplacian)
        if not sparse_lap:
            laplacian = np.asarray(laplacian, dtype=float)
        n = laplacian.shape[0]
        if laplacian.shape != (n, n):
            raise InputError("laplacian must be square")
        mask = np.asarray(mask, dtype=int)
        labels = np.asarray(labels, dtype=float)
        if mask.ndim != 1 or labels.shape != mask.shape:
            raise InputError("mask and labels must be 1D arrays of equal length")
        if mask.size == 0 or np.any(mask < 0) or np.any(mask >= n) or np.unique(mask).size != mask.size:
            raise InputError("mask must be a nonempty set of distinct indices below the dimension")
        fidelity_diag = np.zeros(n)
        fidelity_diag[mask] = alpha
        forcing = np.zeros(n)
        forcing[mask] = alpha * labels

        if sparse_lap:
            stiffness = (scipy.sparse.diags(fidelity_diag) - epsilon * laplacian).tocsr()
        else:
            stiffness = np.diag(fidelity_diag) - epsilon * laplacian
            stiffness = 0.5 * (stiffness + stiffness.T)

        if not sparse_lap and n <= dense_limit:
            cache = SpdFlowCache(stiffness, require_pd=True)
            mu_min = cache.min_eig
            fixed_point = cache.solve(forcing)
        else:
            cache = None
            w = scipy.sparse.linalg.eigsh(
                scipy.sparse.csc_matrix(stiffness), k=1, sigma=0.0, which="LM",
                return_eigenvectors=False,
            )
            mu_min = float(w[0])
            if mu_min <= 0:
                raise InputError(f"fidelity + Dirichlet operator is not PD (mu_min={mu_min:.3e})")
            fixed_point = scipy.sparse.linalg.spsolve(scipy.sparse.csc_matrix(stiffness), forcing)
        for arr in (mask, labels, fidelity_diag, forcing, fixed_point):
            arr.setflags(write=False)
        return cls(
            dim=n, mask=mask, labels=labels, alpha=float(alpha), epsilon=float(epsilon),
            laplacian=laplacian, fidelity_diag=fidelity_diag, forcing=forcing,
            stiffness=stiffness, mu_min=mu_min, linear_fixed_point=fixed_point,
            flow_cache=cache,
        )

    def _check_state(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InputError(f"state has shape {x.shape}, expected ({self.dim},)")
        return x

    def ergodicity_report(self) -> ErgodicityReport:
        rate = 1.0 / self.epsilon
        return ErgodicityReport(mu_min=self.mu_min, expansion_rate=rate,
                                holds=self.mu_min > rate)


def gl_potential(problem: ClassificationProblem, eta) -> float:
    """Fidelity + Dirichlet + well energy of a state.

    The Dirichlet term is evaluated as -(epsilon/2) <eta, L eta> with L the
    (negative semi-definite) discrete Laplacian.
    """
    eta = problem._check_state(eta)
    misfit = eta[problem.mask] - problem.labels
    fidelity = 0.5 * problem.alpha * float(misfit @ misfit)
    dirichlet = -0.5 * problem.epsilon * float(eta @ (problem.laplacian @ eta))
    wells = float(double_well(eta).sum()) / problem.epsilon
    return fidelity + dirichlet + wells


def linear_gradient(problem: ClassificationProblem, x) -> np.ndarray:
    """Gradient of the linear half: (P - eps L) x - forcing."""
    x = problem._check_state(x)
    return problem.stiffness @ x - problem.forcing


def linear_field(problem: ClassificationProblem, x) -> np.ndarray:
    """Right-hand side of the linear subflow ODE (for generator checks)."""
    return -linear_gradient(problem, x)


def linear_subflow(problem: ClassificationProblem, x0, t: float) -> np.ndarray:
    """Exact linear-half flow toward the fixed point, via the cached spectrum.

    Contracts pairs of initial values at rate ``exp(-mu_min t)``.  Only
    available below the dense limit; larger problems must use ``cn_step``.
    """
    x0 = problem._check_state(x0)
    if not t >= 0:
        raise InputError(f"time must be nonnegative, got {t}")
    if problem.flow_cache is None:
        raise ConfigError("no dense spectrum at this dimension; advance with cn_step instead")
    return problem.flow_cache.propagate(problem.linear_fixed_point, x0, t)


def cn_step(problem: ClassificationProblem, x0, dt: float,
            rtol: float = 1e-10, maxiter: int = 2000) -> np.ndarray:
    """One Crank-Nicolson / implicit-midpoint step of the linear half.

    Solves (I + dt/2 M) x1 = (I - dt/2 M) x0 + dt * forcing by conjugate
    gradients (the system is SPD); local error is O(dt^3) against the exact
    exponential.
    """
    x0 = problem._check_state(x0)
    if not dt > 0:
        raise InputError(f"step size must be positive, got {dt}")
    m = problem.stiffness
    half = 0.5 * dt
    mx = m @ x0
    rhs = x0 - half * mx + dt * problem.forcing
    op = scipy.sparse.linalg.LinearOperator(
        (problem.dim, problem.dim), matvec=lambda v: v + half * (m @ v), dtype=float,
    )
    sol, info = scipy.sparse.linalg.cg(op, rhs, x0=x0, rtol=rtol, atol=0.0, maxiter=maxiter)
    if info != 0:
        raise SolverError(f"Crank-Nicolson CG did not converge (info={info})")
    return sol


def double_well_subflow(x0, epsilon: float, t: float) -> np.ndarray:
    """Closed-form double-well flow, coordinatewise.

    Outside [-1, 1] coordinates move toward the nearest well at speed
    1/epsilon and stop there; inside, they grow exponentially away from 0 at
    rate 1/epsilon until absorbed at the well (0 itself is stationary).  The
    interior growth factor is exp(t/epsilon): the published piecewise form
    with factor eps^-1 exp(t) does not solve dx/dt = x/epsilon at t=0 and is
    treated as a typo here.
    """
    x0 = np.asarray(x0, dtype=float)
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if not t >= 0:
        raise InputError(f"time must be nonnegative, got {t}")
    if t == 0.0:
        return x0.copy()
    kappa = 1.0 / epsilon
    out = np.empty_like(x0)
    outer = np.abs(x0) > 1.0
    out[outer] = np.sign(x0[outer]) * np.maximum(np.abs(x0[outer]) - kappa * t, 1.0)
    inner = ~outer
    # |x| e^{kappa t} capped at 1, computed in log space to dodge overflow
    with np.errstate(divide="ignore"):
        grown = np.exp(np.minimum(kappa * t + np.log(np.abs(x0[inner])), 0.0))
    out[inner] = np.sign(x0[inner]) * grown
    return out


def double_well_field(x, epsilon: float) -> np.ndarray:
    """One-sided derivative of the double-well subflow (for generator checks).

    Speed 1/epsilon toward the nearest well outside [-1, 1], x/epsilon
    inside, and exactly 0 at the wells.
    """
    x = np.asarray(x, dtype=float)
    kappa = 1.0 / epsilon
    out = np.where(x < -1.0, kappa, np.where(x > 1.0, -kappa, kappa * x))
    out[np.abs(x) == 1.0] = 0.0
    return out


def allen_cahn_field(problem: ClassificationProblem, x) -> np.ndarray:
    """Averaged one-sided derivative field of the combined flow.

    Coordinates at exactly +-1 stick while the linear pull stays within
    [-1/eps, 1/eps] and otherwise move with the excess force.
    """
    x = problem._check_state(x)
    grad = problem.stiffness @ x - problem.forcing
    kappa = 1.0 / problem.epsilon
    g = np.where(x < -1.0, kappa, np.where(x > 1.0, -kappa, kappa * x))
    at_well = np.abs(x) == 1.0
    if np.any(at_well):
        pull = -grad[at_well]
        g = g.copy()
        g[at_well] = np.where(
            pull > kappa, -kappa, np.where(pull < -kappa, kappa, grad[at_well])
        )
    return 0.5 * (-grad + g)


def simulate_stochastic(problem: ClassificationProblem, eta0, schedule: SwitchSchedule,
                        grid, linear_mode: str = "exact",
                        dt_max: float | None = None) -> TrajectorySample:
    """Switched process: linear subflow in regime 0, double-well in regime 1.

    ``linear_mode="exact"`` uses the cached exponential; ``"cn"`` advances
    each regime-0 event with a single Crank-Nicolson step whose size is the
    event duration (subdivided evenly only if it exceeds ``dt_max``).
    """
    eta0 = problem._check_state(eta0)
    if linear_mode not in ("exact", "cn"):
        raise ConfigError(f"unknown linear mode {linear_mode!r}")
    if linear_mode == "exact":
        if problem.flow_cache is None:
            raise ConfigError("exact linear mode unavailable at this dimension; use linear_mode='cn'")
        linear_map = lambda x, s: problem.flow_cache.propagate(problem.linear_fixed_point, x, s)
    else:
        def linear_map(x, s):
            if dt_max is None or s <= dt_max:
                return cn_step(problem, x, s)
            pieces = math.ceil(s / dt_max)
            h = s / pieces
            for _ in range(pieces):
                x = cn_step(problem, x, h)
            return x

    maps = (linear_map, lambda x, s: double_well_subflow(x, problem.epsilon, s))
    return run_switched_flow(schedule, grid, eta0, maps)


def deterministic_flow(problem: ClassificationProblem, x0, grid, step: float) -> TrajectorySample:
    """Explicit Euler on the averaged one-sided derivative field.

    Coordinates at exactly +-1 stick under the balance condition; an Euler
    update that crosses a well is clamped onto it for that step.  The energy
    is non-increasing along the output up to O(step).
    """
    x0 = problem._check_state(x0)
    if not step > 0:
        raise InputError(f"step must be positive, got {step}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise InputError("time grid must be nonempty, nonnegative, strictly increasing")
    state = x0.copy()
    states = np.empty((grid.size, problem.dim))
    t = 0.0
    for gi, t_target in enumerate(grid):
        span = t_target - t
        if span > 0:
            nsub = max(1, int(np.ceil(span / step)))
            h = span / nsub
            for _ in range(nsub):
                new = state + h * allen_cahn_field(problem, state)
                for well in (-1.0, 1.0):
                    crossed = (state - well) * (new - well) < 0.0
                    new[crossed] = well
                state = new
            t = t_target
        states[gi] = state
    return TrajectorySample(times=grid, states=states)
