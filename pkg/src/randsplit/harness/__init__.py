"""Experiment orchestration: configuration, seeded parallel ensembles, CSV artifacts."""

from .config import ExperimentConfig, load_config
from .experiments import run_class1d, run_class2d, run_lambda_study, run_simulate, run_table1

__all__ = [
    "ExperimentConfig",
    "load_config",
    "run_table1",
    "run_class1d",
    "run_class2d",
    "run_lambda_study",
    "run_simulate",
]
