"""Experiment configuration: JSON files with CLI overrides on top."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError

EXPERIMENTS = ("table1", "class1d", "class2d", "lambda_study", "simulate")


@dataclass
class ExperimentConfig:
    experiment: str = "table1"
    rates: list[float] | None = None          # switching rate(s); JSON key "lambda"
    epsilon: float | None = None
    epsilons: list[float] | None = None       # class1d sweeps several
    alpha: float = 1.0
    horizon: float | None = None
    grid_points: int | None = None
    grid: list[float] | None = None           # explicit grid overrides grid_points
    seeds: int | None = None
    master_seed: int = 20240805
    initial_regime: int = 0
    linear_mode: str | None = None   # None: per-experiment default (cn for class2d)
    output_dir: str = "out"
    workers: int = 1
    smoke: bool = False
    flow: str = "sparse"                       # lambda_study / simulate: sparse | allen_cahn
    size: int = 50                             # class2d grid edge (paper scale: 200)
    stride: int = 5
    dt_max: float | None = None
    design_csv: str | None = None              # optional CSV-backed sparse problem
    data_csv: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; pick one of {EXPERIMENTS}")
        if self.rates is not None:
            self.rates = [float(r) for r in self.rates]
            if any(r <= 0 for r in self.rates):
                raise ConfigError("switching rates must be positive")
            if any(b <= a for a, b in zip(self.rates, self.rates[1:])):
                raise ConfigError("the rate ladder must be strictly increasing")
        if self.seeds is not None and self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if self.horizon is not None and not self.horizon > 0:
            raise ConfigError("horizon must be positive")
        if self.linear_mode not in (None, "exact", "cn"):
            raise ConfigError(f"linear_mode must be 'exact' or 'cn', got {self.linear_mode!r}")
        if self.flow not in ("sparse", "allen_cahn"):
            raise ConfigError(f"flow must be 'sparse' or 'allen_cahn', got {self.flow!r}")
        if self.initial_regime not in (0, 1):
            raise ConfigError("initial_regime must be 0 or 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


_JSON_ALIASES = {"lambda": "rates", "lambdas": "rates", "out": "output_dir", "seed": "master_seed"}


def config_from_dict(raw: dict) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, value in raw.items():
        name = _JSON_ALIASES.get(key, key)
        if name not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if name == "rates" and value is not None and not isinstance(value, (list, tuple)):
            value = [value]
        kwargs[name] = value
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err


def load_config(path: str | None, overrides: dict | None = None) -> ExperimentConfig:
    raw: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as err:
            raise ConfigError(f"cannot read config file {path}: {err}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file {path} is not valid JSON: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    return config_from_dict(raw)
