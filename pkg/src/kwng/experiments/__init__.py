"""Experiment drivers: error sweeps, trajectories, invariance, self-test."""

from .invariance import DiagonalReparam, InvarianceReport, run_invariance
from .records import CSV_HEADER, ExperimentRecord, read_records, write_records
from .selftest import run_selftest
from .sweeps import (
    SweepConfig,
    basis_sizes,
    draw_instance,
    median_by,
    run_bandwidth_sweep,
    run_error_sweep,
)
from .trajectory import TrajectoryResult, run_trajectory, write_trajectory_csv

__all__ = [
    "CSV_HEADER",
    "DiagonalReparam",
    "ExperimentRecord",
    "InvarianceReport",
    "SweepConfig",
    "TrajectoryResult",
    "basis_sizes",
    "draw_instance",
    "median_by",
    "read_records",
    "run_bandwidth_sweep",
    "run_error_sweep",
    "run_invariance",
    "run_selftest",
    "run_trajectory",
    "write_records",
    "write_trajectory_csv",
]
