#!/usr/bin/env python3
"""Throughput comparison of the compiled scalar PDMP kernel vs the pure-Python
fallback on a Table-1-sized workload (scalar example, lam=250, horizon 20).

Usage: python benchmarks/bench_backends.py [n_trajectories]
"""

import sys
import time

import numpy as np

from randsplit._kernels import _pure, backend, scalar_switched_path
from randsplit.switching import SwitchConfig, sample_schedule


def run(kernel, schedules, grid):
    out = np.empty(grid.size)
    regimes = np.empty(grid.size, np.int8)
    total = 0.0
    for sched in schedules:
        total += kernel(sched.durations, 0, 1.0, 4.0, 0.0, sched.horizon,
                        grid, out, regimes)
    return total


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    rate, horizon = 250.0, 20.0
    print(f"preparing {n} schedules at rate {rate:g}, horizon {horizon:g} ...")
    schedules = [sample_schedule(SwitchConfig(rate, seed=(123, k)), horizon)
                 for k in range(n)]
    events = sum(s.n_events for s in schedules)
    grid = np.linspace(0.0, horizon, 41)

    candidates = [("pure-python", _pure.scalar_switched_path)]
    if backend() == "cython":
        candidates.insert(0, ("cython", scalar_switched_path))
    else:
        print("compiled extension not available; timing the fallback only")

    results = {}
    for name, kernel in candidates:
        start = time.perf_counter()
        checksum = run(kernel, schedules, grid)
        elapsed = time.perf_counter() - start
        results[name] = (elapsed, checksum)
        print(f"{name:12s} {elapsed * 1e3:9.1f} ms   {events / elapsed / 1e6:8.1f} M events/s"
              f"   checksum {checksum:.12f}")

    if len(results) == 2:
        (fast, (t_fast, c_fast)), (slow, (t_slow, c_slow)) = results.items()
        print(f"\nspeedup {slow} -> {fast}: {t_slow / t_fast:.1f}x; "
              f"bit-identical results: {c_fast == c_slow}")


if __name__ == "__main__":
    main()
