"""Dense numerical kernels shared by both flows.

Symmetric matrix exponentials, SPD solves, discrete Laplacians, and the
soft-thresholding map.  Everything here is a pure function of its inputs;
the only stateful object is :class:`SpdFlowCache`, which caches one
symmetric eigendecomposition so that repeated ``exp(-t M)`` actions and
solves cost two matrix-vector products each.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import DecompositionError, InputError, InvariantError, SolverError

# Dense operators are eigendecomposed below this dimension; above it only
# sparse/iterative paths are offered.  Overridable per call site.
DENSE_DIM_LIMIT = 1000

# Assembled 2D Kronecker-sum operators are refused above this many points.
MAX_KRON_POINTS = 250_000

SYMMETRY_RTOL = 1e-12


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def require_symmetric(m: np.ndarray, rtol: float = SYMMETRY_RTOL) -> None:
    """Raise InvariantError unless ``m`` is symmetric to ``rtol * max|m|``."""
    scale = np.max(np.abs(m)) if m.size else 0.0
    tol = rtol * max(scale, 1e-300)
    gap = np.max(np.abs(m - m.T)) if m.size else 0.0
    if gap > tol:
        raise InvariantError(f"matrix is not symmetric: max asymmetry {gap:.3e} > {tol:.3e}")


def mat_exp_spd(m, t: float) -> np.ndarray:
    """Decay semigroup ``exp(-t m)`` of a symmetric matrix.

    Computed through the symmetric eigendecomposition ``Q exp(-t L) Q^T``,
    which is exact for the symmetric operators used here and keeps the
    result symmetric by construction.
    """
    m = _as_matrix(m)
    require_symmetric(m)
    if not np.isfinite(t) or t < 0:
        raise InputError(f"time must be a finite nonnegative real, got {t}")
    w, q = np.linalg.eigh(m)
    e = np.exp(-t * w)
    out = (q * e) @ q.T
    return 0.5 * (out + out.T)


def spd_solve(m, v):
    """Solve ``m x = v`` for symmetric positive definite ``m``.

    Dense inputs use a Cholesky factorization; sparse inputs use conjugate
    gradients to a relative residual of 1e-12.
    """
    if scipy.sparse.issparse(m):
        v = np.asarray(v, dtype=float)
        x, info = scipy.sparse.linalg.cg(m, v, rtol=1e-12, atol=0.0)
        if info != 0:
            raise SolverError(f"conjugate gradient did not converge (info={info})")
        return x
    m = _as_matrix(m)
    require_symmetric(m)
    v = np.asarray(v, dtype=float)
    if v.shape[0] != m.shape[0]:
        raise InputError(f"dimension mismatch: matrix {m.shape[0]}, vector {v.shape[0]}")
    try:
        cho = scipy.linalg.cho_factor(m)
    except scipy.linalg.LinAlgError as err:
        raise DecompositionError(f"Cholesky factorization failed: {err}") from err
    return scipy.linalg.cho_solve(cho, v)


def laplacian_1d(n: int, h: float) -> np.ndarray:
    """Centered-difference 1D Laplacian with Dirichlet-0 boundary.

    Tridiagonal with diagonal ``-2/h^2`` and off-diagonal ``1/h^2``; its
    negation is strictly positive definite.
    """
    if n < 2:
        raise InputError(f"need at least 2 grid points, got {n}")
    if not h > 0:
        raise InputError(f"grid spacing must be positive, got {h}")
    lap = np.zeros((n, n))
    np.fill_diagonal(lap, -2.0 / h**2)
    idx = np.arange(n - 1)
    lap[idx, idx + 1] = 1.0 / h**2
    lap[idx + 1, idx] = 1.0 / h**2
    return lap


def laplacian_2d_kron(n: int, h: float, max_points: int = MAX_KRON_POINTS) -> scipy.sparse.csr_matrix:
    """Kronecker-sum 2D Laplacian ``I (x) L1 + L1 (x) I`` on n^2 points, sparse."""
    if n < 2:
        raise InputError(f"need at least 2 grid points per axis, got {n}")
    if n * n > max_points:
        raise InputError(f"{n}x{n} grid exceeds the configured maximum of {max_points} points")
    lap1 = scipy.sparse.csr_matrix(laplacian_1d(n, h))
    eye = scipy.sparse.identity(n, format="csr")
    return (scipy.sparse.kron(eye, lap1) + scipy.sparse.kron(lap1, eye)).tocsr()


def soft_threshold(x, t: float) -> np.ndarray:
    """Componentwise ``sgn(x) * max(|x| - t, 0)``.

    The proximal map of the L1 norm, and simultaneously the exact time-``t``
    state of the L1 subgradient flow.  Non-expansive in ``x`` for every
    ``t >= 0``.
    """
    if not t >= 0:
        raise InputError(f"threshold must be nonnegative, got {t}")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


class SpdFlowCache:
    """Cached eigendecomposition of a symmetric PSD operator.

    Supports the affine decay flow ``target + exp(-t M)(x - target)``, plain
    ``exp(-t M) v`` actions, SPD solves, and exposes the extreme eigenvalues.
    The decomposition is computed once at construction; instances are
    read-only afterwards and safe to share across worker threads.
    """

    def __init__(self, matrix, require_pd: bool = False):
        matrix = _as_matrix(matrix)
        require_symmetric(matrix)
        self.matrix = matrix
        w, q = np.linalg.eigh(matrix)
        self.eigenvalues = w
        self.eigenvectors = q
        self.min_eig = float(w[0])
        self.max_eig = float(w[-1])
        if require_pd and self.min_eig <= 0:
            raise DecompositionError(
                f"operator declared SPD has smallest eigenvalue {self.min_eig:.3e}"
            )
        for arr in (self.matrix, self.eigenvalues, self.eigenvectors):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply_exp_neg(self, t: float, v: np.ndarray) -> np.ndarray:
        """Return ``exp(-t M) v``."""
        if not t >= 0:
            raise InputError(f"time must be nonnegative, got {t}")
        coeff = self.eigenvectors.T @ v
        return self.eigenvectors @ (np.exp(-t * self.eigenvalues) * coeff)

    def propagate(self, target: np.ndarray, x: np.ndarray, t: float) -> np.ndarray:
        """Exact state ``target + exp(-t M)(x - target)`` of dx/dt = -M(x - target)."""
        if t == 0.0:
            return np.array(x, dtype=float, copy=True)
        return target + self.apply_exp_neg(t, x - target)

    def solve(self, v: np.ndarray) -> np.ndarray:
        if self.min_eig <= 0:
            raise DecompositionError("cannot solve: operator is not positive definite")
        coeff = self.eigenvectors.T @ v
        return self.eigenvectors @ (coeff / self.eigenvalues)
