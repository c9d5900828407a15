"""Sweeps and verification batteries."""

from minksym.experiments.sweep import SweepResult, SweepSpec, SweepTask, run_sweep, run_task
from minksym.experiments.verify import SUITES, SuiteReport, VerifyOptions, run_suite

__all__ = [
    "SUITES",
    "SuiteReport",
    "SweepResult",
    "SweepSpec",
    "SweepTask",
    "VerifyOptions",
    "run_suite",
    "run_sweep",
    "run_task",
]
