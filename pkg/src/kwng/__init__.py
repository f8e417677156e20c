"""Kernelized natural-gradient estimation for implicit models.

A library plus experiment CLI: subsampled kernel-derivative estimators of
the Wasserstein natural gradient, a synthetic model zoo with exact
oracles, a descent loop with trust-region damping adaptation, and
reproducible error sweeps.
"""

from . import errors, estimator, kernels, models, numerics, optimizer
from .estimator import (
    EstimatorConfig,
    GradientVector,
    NystromBasis,
    SampleBatch,
    clip_by_norm,
    estimate,
)
from .kernels import KernelSpec
from .models import build_model
from .optimizer import DescentConfig, DescentTrace, LMState, run_descent

__version__ = "0.1.0"

__all__ = [
    "DescentConfig",
    "DescentTrace",
    "EstimatorConfig",
    "GradientVector",
    "KernelSpec",
    "LMState",
    "NystromBasis",
    "SampleBatch",
    "build_model",
    "clip_by_norm",
    "errors",
    "estimate",
    "estimator",
    "kernels",
    "models",
    "numerics",
    "optimizer",
    "run_descent",
]
