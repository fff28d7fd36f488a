"""Deterministic CSV writing plus the JSON metadata sidecar.

Floats are serialized with ``repr`` (shortest round-trip form), rows are
written with plain ``\\n`` separators, and nothing run-dependent (timing,
host) enters the CSV itself; such metadata lives in the sidecar only.
"""

from __future__ import annotations

import hashlib
import json
import os

from .. import __version__


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if hasattr(value, "__index__"):  # python and numpy integers
        return str(int(value))
    return repr(float(value))


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def write_ensemble_stats_csv(stats, path: str) -> None:
    """Time-resolved ensemble table: one (time, index, mean, variance) row per
    grid time and coordinate, ready for band plotting."""
    rows = (
        (t, i, stats.mean[ti, i], stats.variance[ti, i])
        for ti, t in enumerate(stats.times)
        for i in range(stats.mean.shape[1])
    )
    write_csv(path, ["time", "index", "mean", "variance"], rows)


def config_hash(config_dict: dict) -> str:
    canonical = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_sidecar(csv_paths: list[str], config_dict: dict, wall_time: float,
                  out_dir: str, name: str) -> str:
    meta = {
        "config": config_dict,
        "config_sha256": config_hash(config_dict),
        "library_version": __version__,
        "wall_time_seconds": wall_time,
        "outputs": [os.path.basename(p) for p in csv_paths],
    }
    path = os.path.join(out_dir, f"{name}.meta.json")
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
