"""Bundled and generated problem fixtures.

The 1D ground truth ships as a package CSV (the published experiment's exact
vector is not available; this one has the same qualitative shape: blocky,
non-monotonic, non-oscillating).  The 2D ground truth is generated from a
disk-plus-bar formula at any grid size.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from ..allen_cahn import ClassificationProblem, stride_mask
from ..errors import InputError
from ..numkit import laplacian_1d, laplacian_2d_kron
from ..sparse_flow import SparseProblem


def load_labels_csv(path) -> np.ndarray:
    """1D classification vector from a one-column CSV with values in {-1, 1}."""
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=1)
    if not np.all(np.isin(values, (-1.0, 1.0))):
        raise InputError(f"classification fixture {path} has values outside {{-1, 1}}")
    return values


def load_grid_csv(path) -> np.ndarray:
    """2D classification grid from a headerless CSV of -1/1 rows."""
    grid = np.loadtxt(path, delimiter=",", ndmin=2)
    if not np.all(np.isin(grid, (-1.0, 1.0))):
        raise InputError(f"classification grid {path} has values outside {{-1, 1}}")
    return grid


def class1d_truth() -> np.ndarray:
    """The bundled 200-point ground truth for the 1D classification runs."""
    ref = resources.files("randsplit.fixtures").joinpath("class1d_truth.csv")
    try:
        with resources.as_file(ref) as path:
            return load_labels_csv(path)
    except FileNotFoundError as err:
        raise InputError("bundled fixture class1d_truth.csv is missing") from err


def class2d_truth(n: int) -> np.ndarray:
    """Disk-plus-bar classification scene on an n-by-n grid, values in {-1, 1}."""
    if n < 10:
        raise InputError(f"2D scene needs at least a 10x10 grid, got {n}")
    ys, xs = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    u = (xs + 0.5) / n
    v = (ys + 0.5) / n
    disk = (u - 0.38) ** 2 + (v - 0.62) ** 2 <= 0.22**2
    bar = (0.55 <= u) & (u <= 0.88) & (0.14 <= v) & (v <= 0.42)
    return np.where(disk | bar, 1.0, -1.0)


def classification_problem_1d(epsilon: float, alpha: float = 1.0, n: int = 200,
                              h: float = 0.2, stride: int = 5,
                              truth: np.ndarray | None = None):
    """The 1D classification fixture: stride-observed truth on a 200-point line."""
    if truth is None:
        truth = class1d_truth() if n == 200 else ladder_truth_1d(n)
    if truth.shape != (n,):
        raise InputError(f"truth has shape {truth.shape}, expected ({n},)")
    mask = stride_mask(n, stride)
    problem = ClassificationProblem.build(
        mask, truth[mask], alpha=alpha, epsilon=epsilon, laplacian=laplacian_1d(n, h),
    )
    return problem, truth


def ladder_truth_1d(n: int) -> np.ndarray:
    """Two-block ground truth used by the small switching-rate-ladder fixture."""
    truth = -np.ones(n)
    a1, b1 = int(0.1 * n), int(0.36 * n)
    a2, b2 = int(0.56 * n), int(0.88 * n)
    truth[a1:b1] = 1.0
    truth[a2:b2] = 1.0
    return truth


def classification_problem_2d(n: int, epsilon: float, alpha: float = 1.0,
                              h: float = 0.2, stride: int = 5):
    """The 2D classification fixture on an n-by-n grid with a stride-mask."""
    truth = class2d_truth(n)
    flat = truth.ravel()  # row-major
    rows = stride_mask(n, stride)
    mask = (rows[:, None] * n + rows[None, :]).ravel()
    problem = ClassificationProblem.build(
        mask, flat[mask], alpha=alpha, epsilon=epsilon, laplacian=laplacian_2d_kron(n, h),
    )
    return problem, truth


def random_sparse_problem(m: int, n: int, seed: int, scale: float = 1.0) -> SparseProblem:
    """Gaussian random full-rank design with a Gaussian data vector."""
    if m < n:
        raise InputError("need at least as many rows as columns for full column rank")
    rng = np.random.default_rng(seed)
    design = rng.standard_normal((m, n)) * scale
    data = rng.standard_normal(m) * scale
    return SparseProblem.from_design(design, data)
