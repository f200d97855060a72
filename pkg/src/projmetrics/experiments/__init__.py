from .config import ConfigError, ExperimentConfig
from .runners import (
    AssertionFailure,
    run_fibers,
    run_lemma,
    run_thm1,
    run_thm2,
    run_thm3,
    run_validation,
)
from .tables import CsvTable, read_csv, write_csv, write_svg

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "AssertionFailure",
    "CsvTable",
    "read_csv",
    "write_csv",
    "write_svg",
    "run_thm1",
    "run_thm2",
    "run_thm3",
    "run_lemma",
    "run_validation",
    "run_fibers",
]
