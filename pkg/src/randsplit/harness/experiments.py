"""Experiment runners: seeded parallel ensembles writing deterministic CSVs.

Every runner is a pure function of (config, master seed): per-trajectory
streams are derived from (master_seed, job_index, trajectory_index) with a
counter-based generator, batches are assembled in trajectory order, and CSV
bytes therefore do not depend on the worker count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..allen_cahn import simulate_stochastic as ac_simulate
from ..allen_cahn import deterministic_flow as ac_deterministic
from ..diagnostics import LambdaStudyRow, ladder_is_decreasing
from ..errors import ConfigError
from ..sparse_flow import canonical_1d, deterministic_flow, simulate_stochastic, SparseProblem
from ..switching import SwitchConfig, sample_schedule
from .config import ExperimentConfig
from .fixtures import classification_problem_1d, classification_problem_2d, ladder_truth_1d
from .runio import write_csv, write_sidecar

TABLE1_RATES = (0.25, 2.5, 25.0, 250.0)
TABLE1_HIST_BINS = 80
TABLE1_HIST_RANGE = (-0.5, 4.5)
CLASS1D_TIMES = (4.0, 16.0, 64.0)
CLASS2D_TIMES = (2.0, 4.0, 8.0, 16.0)
SPARSE_LADDER = (2.5, 25.0, 250.0)
AC_LADDER = (1.0, 10.0, 100.0)
AC_LADDER_EPSILON = 0.25
DEFAULT_EULER_STEP_SPARSE = 2e-4
DEFAULT_EULER_STEP_AC = 5e-4


def _chunks(total: int, pieces: int) -> list[tuple[int, int]]:
    pieces = max(1, min(pieces, total))
    edges = np.linspace(0, total, pieces + 1, dtype=int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _pool_map(worker, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, jobs))


def _sparse_problem(cfg: ExperimentConfig) -> SparseProblem:
    if cfg.design_csv is not None or cfg.data_csv is not None:
        if cfg.design_csv is None or cfg.data_csv is None:
            raise ConfigError("design_csv and data_csv must be given together")
        return SparseProblem.from_csv(cfg.design_csv, cfg.data_csv)
    return canonical_1d()


# ---------------------------------------------------------------- table 1

def _sparse_terminal_batch(job):
    rate, job_index, master, start, stop, horizon, initial_regime = job
    problem = canonical_1d()
    theta0 = np.zeros(1)
    terminal_grid = np.array([horizon])
    out = np.empty(stop - start)
    for k in range(start, stop):
        cfg = SwitchConfig(rate, initial_regime, seed=(master, job_index, k))
        schedule = sample_schedule(cfg, horizon)
        out[k - start] = simulate_stochastic(problem, theta0, schedule, terminal_grid).states[-1, 0]
    return out


def sparse_scalar_ensemble(rate: float, seeds: int, record_times, master: int,
                           job_index: int = 0, initial_regime: int = 0,
                           workers: int = 1) -> np.ndarray:
    """States of the scalar example at the given times, one row per seed."""
    record_times = np.asarray(record_times, dtype=float)
    horizon = float(record_times[-1])
    jobs = [
        (rate, job_index, master, a, b, horizon, initial_regime, record_times)
        for a, b in _chunks(seeds, workers * 4)
    ]
    parts = _pool_map(_sparse_grid_batch, jobs, workers)
    return np.concatenate(parts, axis=0)


def _sparse_grid_batch(job):
    rate, job_index, master, start, stop, horizon, initial_regime, grid = job
    problem = canonical_1d()
    theta0 = np.zeros(1)
    out = np.empty((stop - start, grid.size))
    for k in range(start, stop):
        cfg = SwitchConfig(rate, initial_regime, seed=(master, job_index, k))
        schedule = sample_schedule(cfg, horizon)
        out[k - start] = simulate_stochastic(problem, theta0, schedule, grid).states[:, 0]
    return out


def run_table1(cfg: ExperimentConfig) -> dict:
    """10^4 seeded runs of the scalar example per switching rate; means,
    variances, and fixed-bin histogram counts of the terminal state."""
    rates = cfg.rates or list(TABLE1_RATES)
    horizon = cfg.horizon if cfg.horizon is not None else 20.0
    seeds = cfg.seeds if cfg.seeds is not None else 10_000
    if cfg.smoke:
        seeds = min(seeds, 200)
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.monotonic()

    summary_rows = []
    hist_rows = []
    stats = {}
    for job_index, rate in enumerate(rates):
        jobs = [
            (rate, job_index, cfg.master_seed, a, b, horizon, cfg.initial_regime)
            for a, b in _chunks(seeds, cfg.workers * 4)
        ]
        samples = np.concatenate(_pool_map(_sparse_terminal_batch, jobs, cfg.workers))
        mean = float(samples.mean())
        variance = float(samples.var(ddof=1))
        stats[rate] = {"mean": mean, "variance": variance, "samples": samples}
        summary_rows.append((rate, seeds, mean, variance))
        counts, edges = np.histogram(samples, bins=TABLE1_HIST_BINS, range=TABLE1_HIST_RANGE)
        for left, right, count in zip(edges[:-1], edges[1:], counts):
            hist_rows.append((rate, left, right, int(count)))

    table_path = os.path.join(cfg.output_dir, "table1.csv")
    hist_path = os.path.join(cfg.output_dir, "table1_hist.csv")
    write_csv(table_path, ["lambda", "seeds", "mean", "variance"], summary_rows)
    write_csv(hist_path, ["lambda", "bin_left", "bin_right", "count"], hist_rows)
    write_sidecar([table_path, hist_path], cfg.as_dict(), time.monotonic() - started,
                  cfg.output_dir, "table1")
    return {"stats": stats, "paths": [table_path, hist_path]}


# ---------------------------------------------------------------- class 1d

def _class1d_batch(job):
    (eps, rate, job_index, master, start, stop, horizon, record_times, alpha,
     stride, initial_regime) = job
    problem, _ = classification_problem_1d(eps, alpha=alpha, stride=stride)
    grid = np.asarray(record_times)
    eta0 = np.zeros(problem.dim)
    out = np.empty((stop - start, grid.size, problem.dim))
    for k in range(start, stop):
        swc = SwitchConfig(rate, initial_regime, seed=(master, job_index, k))
        schedule = sample_schedule(swc, horizon)
        out[k - start] = ac_simulate(problem, eta0, schedule, grid).states
    return out


def run_class1d(cfg: ExperimentConfig) -> dict:
    """1D classification ensembles for each (rate, epsilon) pair; per-time
    mean and standard-deviation vectors against the bundled ground truth."""
    rates = cfg.rates or [1.0, 10.0]
    epsilons = cfg.epsilons or ([cfg.epsilon] if cfg.epsilon is not None else [1e-2, 1e-4, 1e-6])
    horizon = cfg.horizon if cfg.horizon is not None else CLASS1D_TIMES[-1]
    seeds = cfg.seeds if cfg.seeds is not None else 100
    if cfg.smoke:
        seeds = min(seeds, 8)
    record_times = tuple(t for t in CLASS1D_TIMES if t <= horizon) or (horizon,)
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.monotonic()

    _, truth = classification_problem_1d(epsilons[0], alpha=cfg.alpha, stride=cfg.stride)
    mask = np.zeros(truth.size, dtype=bool)
    mask[np.arange(0, truth.size, cfg.stride)] = True

    paths = []
    results = {}
    job_index = 0
    for rate in rates:
        for eps in epsilons:
            jobs = [
                (eps, rate, job_index, cfg.master_seed, a, b, horizon, record_times,
                 cfg.alpha, cfg.stride, cfg.initial_regime)
                for a, b in _chunks(seeds, cfg.workers * 4)
            ]
            stack = np.concatenate(_pool_map(_class1d_batch, jobs, cfg.workers), axis=0)
            mean = stack.mean(axis=0)
            std = stack.std(axis=0, ddof=1)
            results[(rate, eps)] = {"times": record_times, "mean": mean, "std": std}
            rows = []
            for ti, t in enumerate(record_times):
                for i in range(truth.size):
                    rows.append((t, i, mean[ti, i], std[ti, i], truth[i], bool(mask[i])))
            path = os.path.join(cfg.output_dir, f"class1d_lam{rate:g}_eps{eps:g}.csv")
            write_csv(path, ["time", "index", "mean", "std", "truth", "observed"], rows)
            paths.append(path)
            job_index += 1
    write_sidecar(paths, cfg.as_dict(), time.monotonic() - started, cfg.output_dir, "class1d")
    return {"results": results, "truth": truth, "observed": mask, "paths": paths}


# ---------------------------------------------------------------- class 2d

def _class2d_batch(job):
    (n, eps, rate, master, start, stop, horizon, record_times, alpha, stride,
     initial_regime, dt_max) = job
    problem, _ = classification_problem_2d(n, eps, alpha=alpha, stride=stride)
    grid = np.asarray(record_times)
    eta0 = np.zeros(problem.dim)
    out = np.empty((stop - start, grid.size, problem.dim))
    for k in range(start, stop):
        swc = SwitchConfig(rate, initial_regime, seed=(master, 0, k))
        schedule = sample_schedule(swc, horizon)
        out[k - start] = ac_simulate(problem, eta0, schedule, grid,
                                     linear_mode="cn", dt_max=dt_max).states
    return out


def run_class2d(cfg: ExperimentConfig) -> dict:
    """2D classification ensemble with Crank-Nicolson linear events; mean and
    standard-deviation grids at the recording times."""
    mode = cfg.linear_mode or "cn"
    if mode != "cn":
        raise ConfigError("class2d requires linear_mode='cn' (dense exponentials are "
                          f"not available at {cfg.size}x{cfg.size})")
    n = cfg.size
    rate = cfg.rates[0] if cfg.rates else 20.0
    eps = cfg.epsilon if cfg.epsilon is not None else 0.005
    horizon = cfg.horizon if cfg.horizon is not None else CLASS2D_TIMES[-1]
    seeds = cfg.seeds if cfg.seeds is not None else 100
    if cfg.smoke:
        seeds = min(seeds, 3)
        n = min(n, 40)
    record_times = tuple(t for t in CLASS2D_TIMES if t <= horizon) or (horizon,)
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.monotonic()

    problem, truth = classification_problem_2d(n, eps, alpha=cfg.alpha, stride=cfg.stride)
    observed = np.zeros(n * n, dtype=bool)
    observed[problem.mask] = True

    jobs = [
        (n, eps, rate, cfg.master_seed, a, b, horizon, record_times, cfg.alpha,
         cfg.stride, cfg.initial_regime, cfg.dt_max)
        for a, b in _chunks(seeds, cfg.workers * 4)
    ]
    stack = np.concatenate(_pool_map(_class2d_batch, jobs, cfg.workers), axis=0)
    mean = stack.mean(axis=0)
    std = stack.std(axis=0, ddof=1)

    rows = []
    flat_truth = truth.ravel()
    for ti, t in enumerate(record_times):
        for idx in range(n * n):
            rows.append((t, idx // n, idx % n, mean[ti, idx], std[ti, idx],
                         flat_truth[idx], bool(observed[idx])))
    path = os.path.join(cfg.output_dir, "class2d_stats.csv")
    write_csv(path, ["time", "row", "col", "mean", "std", "truth", "observed"], rows)
    write_sidecar([path], cfg.as_dict(), time.monotonic() - started, cfg.output_dir, "class2d")
    return {"times": record_times, "mean": mean, "std": std, "problem": problem,
            "truth": truth, "size": n, "paths": [path]}


def mask_agreement(mean_state: np.ndarray, problem) -> float:
    """Fraction of observed entries whose mean sign matches the training label."""
    signs = np.sign(mean_state[problem.mask])
    return float(np.mean(signs == np.sign(problem.labels)))


# ---------------------------------------------------------------- rate ladder

def _ladder_batch_sparse(job):
    rate, job_index, master, start, stop, horizon, initial_regime, grid, baseline = job
    problem = canonical_1d()
    theta0 = np.zeros(1)
    out = np.empty(stop - start)
    for k in range(start, stop):
        swc = SwitchConfig(rate, initial_regime, seed=(master, job_index, k))
        schedule = sample_schedule(swc, horizon)
        states = simulate_stochastic(problem, theta0, schedule, grid).states
        out[k - start] = np.max(np.linalg.norm(states - baseline, axis=1))
    return out


def _ladder_batch_ac(job):
    (rate, job_index, master, start, stop, horizon, initial_regime, grid, baseline,
     n, eps, alpha, stride) = job
    problem, _ = classification_problem_1d(eps, alpha=alpha, n=n, stride=stride,
                                           truth=ladder_truth_1d(n))
    eta0 = np.zeros(problem.dim)
    out = np.empty(stop - start)
    for k in range(start, stop):
        swc = SwitchConfig(rate, initial_regime, seed=(master, job_index, k))
        schedule = sample_schedule(swc, horizon)
        states = ac_simulate(problem, eta0, schedule, grid).states
        out[k - start] = np.max(np.linalg.norm(states - baseline, axis=1))
    return out


def run_lambda_study(cfg: ExperimentConfig) -> dict:
    """Median sup-distance between the switched process and its deterministic
    baseline for each rate on the ladder, plus one sample path per rate."""
    if cfg.flow == "sparse":
        rates = cfg.rates or list(SPARSE_LADDER)
        horizon = cfg.horizon if cfg.horizon is not None else 20.0
        grid = _resolve_grid(cfg, horizon, default_points=401)
        problem = _sparse_problem(cfg)
        if problem.dim != 1:
            raise ConfigError("the bundled rate-ladder study runs on scalar problems")
        baseline = deterministic_flow(problem, np.zeros(1), grid, DEFAULT_EULER_STEP_SPARSE).states
    else:
        rates = cfg.rates or list(AC_LADDER)
        horizon = cfg.horizon if cfg.horizon is not None else 8.0
        grid = _resolve_grid(cfg, horizon, default_points=161)
        n = 50
        eps = cfg.epsilon if cfg.epsilon is not None else AC_LADDER_EPSILON
        problem, _ = classification_problem_1d(eps, alpha=cfg.alpha, n=n, stride=cfg.stride,
                                               truth=ladder_truth_1d(n))
        baseline = ac_deterministic(problem, np.zeros(n), grid, DEFAULT_EULER_STEP_AC).states
    seeds = cfg.seeds if cfg.seeds is not None else 200
    if cfg.smoke:
        seeds = min(seeds, 24)
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.monotonic()

    rows: list[LambdaStudyRow] = []
    paths = []
    for job_index, rate in enumerate(rates):
        if cfg.flow == "sparse":
            jobs = [
                (rate, job_index, cfg.master_seed, a, b, horizon, cfg.initial_regime,
                 grid, baseline)
                for a, b in _chunks(seeds, cfg.workers * 4)
            ]
            sups = np.concatenate(_pool_map(_ladder_batch_sparse, jobs, cfg.workers))
            path_problem = canonical_1d()
            swc = SwitchConfig(rate, cfg.initial_regime, seed=(cfg.master_seed, job_index, 0))
            sample = simulate_stochastic(path_problem, np.zeros(1),
                                         sample_schedule(swc, horizon), grid)
        else:
            eps = cfg.epsilon if cfg.epsilon is not None else AC_LADDER_EPSILON
            jobs = [
                (rate, job_index, cfg.master_seed, a, b, horizon, cfg.initial_regime,
                 grid, baseline, 50, eps, cfg.alpha, cfg.stride)
                for a, b in _chunks(seeds, cfg.workers * 4)
            ]
            sups = np.concatenate(_pool_map(_ladder_batch_ac, jobs, cfg.workers))
            swc = SwitchConfig(rate, cfg.initial_regime, seed=(cfg.master_seed, job_index, 0))
            sample = ac_simulate(problem, np.zeros(problem.dim),
                                 sample_schedule(swc, horizon), grid)
        rows.append(LambdaStudyRow(
            rate=rate, median=float(np.median(sups)), q25=float(np.quantile(sups, 0.25)),
            q75=float(np.quantile(sups, 0.75)), seeds=seeds,
        ))
        path = os.path.join(cfg.output_dir, f"lambda_path_{rate:g}.csv")
        _write_trajectory(path, sample)
        paths.append(path)

    table_path = os.path.join(cfg.output_dir, "lambda_study.csv")
    write_csv(table_path, ["lambda", "median", "q25", "q75", "seeds"],
              [(r.rate, r.median, r.q25, r.q75, r.seeds) for r in rows])
    paths.insert(0, table_path)
    write_sidecar(paths, cfg.as_dict(), time.monotonic() - started,
                  cfg.output_dir, "lambda_study")
    return {"rows": rows, "decreasing": ladder_is_decreasing(rows), "paths": paths}


# ---------------------------------------------------------------- single path

def _write_trajectory(path: str, sample) -> None:
    header = ["time", "regime"] + [f"x_{i}" for i in range(sample.dim)]
    regimes = sample.regimes if sample.regimes is not None else np.zeros(sample.times.size, np.int8)
    rows = (
        (t, int(r), *state)
        for t, r, state in zip(sample.times, regimes, sample.states)
    )
    write_csv(path, header, rows)


def run_simulate(cfg: ExperimentConfig) -> dict:
    """One seeded trajectory of either flow, written as a trajectory CSV."""
    rate = cfg.rates[0] if cfg.rates else (25.0 if cfg.flow == "sparse" else 10.0)
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.monotonic()
    if cfg.flow == "sparse":
        horizon = cfg.horizon if cfg.horizon is not None else 20.0
        grid = _resolve_grid(cfg, horizon, default_points=801)
        problem = _sparse_problem(cfg)
        swc = SwitchConfig(rate, cfg.initial_regime, seed=(cfg.master_seed, 0, 0))
        sample = simulate_stochastic(problem, np.zeros(problem.dim),
                                     sample_schedule(swc, horizon), grid)
    else:
        horizon = cfg.horizon if cfg.horizon is not None else 16.0
        grid = _resolve_grid(cfg, horizon, default_points=321)
        eps = cfg.epsilon if cfg.epsilon is not None else 1e-2
        problem, _ = classification_problem_1d(eps, alpha=cfg.alpha, stride=cfg.stride)
        swc = SwitchConfig(rate, cfg.initial_regime, seed=(cfg.master_seed, 0, 0))
        sample = ac_simulate(problem, np.zeros(problem.dim), sample_schedule(swc, horizon),
                             grid, linear_mode=cfg.linear_mode or "exact", dt_max=cfg.dt_max)
    path = os.path.join(cfg.output_dir, "trajectory.csv")
    _write_trajectory(path, sample)
    write_sidecar([path], cfg.as_dict(), time.monotonic() - started,
                  cfg.output_dir, "simulate")
    return {"sample": sample, "paths": [path]}


def _resolve_grid(cfg: ExperimentConfig, horizon: float, default_points: int) -> np.ndarray:
    if cfg.grid is not None:
        grid = np.asarray(cfg.grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("explicit grid must be strictly increasing and nonempty")
        if grid[-1] > horizon:
            raise ConfigError("explicit grid exceeds the horizon")
        return grid
    points = cfg.grid_points if cfg.grid_points is not None else default_points
    if points < 2:
        raise ConfigError("need at least two grid points")
    return np.linspace(0.0, horizon, points)
