"""Relative-error sweeps over sample size, basis size, dimension, bandwidth.

Each sweep cell draws a random model parameter and a random Euclidean
gradient (both from a centered normal with variance 0.1), estimates the
natural gradient from fresh samples and compares it against the model's
exact oracle.  The relative error is ||estimate - exact|| / ||exact||.

Every run derives its generator from (master seed, run_id), so results
are reproducible and independent of worker scheduling.  Estimator
failures are recorded as NaN relative error and the sweep continues.
"""

import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import KwngError, OracleUnavailableError
from ..estimator import EstimatorConfig, estimate
from ..kernels import KernelSpec
from ..models import build_model, vech
from .records import ExperimentRecord

_DRAW_STD = math.sqrt(0.1)


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition plus estimator settings for an error sweep."""

    model: str = "sphere"
    dims: Tuple[int, ...] = (3,)
    samples: Tuple[int, ...] = (5000,)
    basis_rule: Union[str, Tuple[int, ...]] = "dsqrtn"  # or explicit sizes
    kernel: KernelSpec = KernelSpec(bandwidth="fixed", fixed_value=1.0)
    epsilon: float = 1e-5
    lam: float = 0.0
    damping: str = "ttildecols"
    clip_norm: Optional[float] = None
    pinv_rtol: Optional[float] = None
    runs: int = 50
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.dims:
            raise ValueError("dims must be non-empty")

    def estimator_config(self):
        return EstimatorConfig(
            epsilon=self.epsilon, lam=self.lam, damping=self.damping,
            pinv_rtol=self.pinv_rtol, clip_norm=self.clip_norm,
        )


def basis_sizes(rule, d, n):
    """Expand the basis rule to explicit sizes for one (d, N) cell."""
    if rule == "dsqrtn":
        return (max(1, int(d * math.sqrt(n))),)
    if isinstance(rule, str):
        raise ValueError(f"unknown basis rule {rule!r}")
    return tuple(int(m) for m in rule)


def draw_instance(model_name, d, rng):
    """Random parameter vector and Euclidean gradient for one run.

    Mean-like coordinates come from a centered normal with variance 0.1.
    Covariances are rebuilt as Q diag(0.5 + |v|) Q^T from drawn values so
    they stay positive definite; the sphere radius is lifted the same way.
    """
    model = build_model(model_name, d)
    if model_name in ("gaussian", "lognormal"):
        mu = rng.normal(0.0, _DRAW_STD, size=d)
        vals = rng.normal(0.0, _DRAW_STD, size=d)
        Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
        Sigma = Q @ np.diag(0.5 + np.abs(vals)) @ Q.T
        theta = np.concatenate([mu, vech(Sigma)])
    elif model_name == "sphere":
        c = rng.normal(0.0, _DRAW_STD, size=d)
        r = 0.5 + abs(rng.normal(0.0, _DRAW_STD))
        theta = np.concatenate([c, [r]])
    else:
        raise ValueError(f"unknown model {model_name!r}")
    euclid = rng.normal(0.0, _DRAW_STD, size=model.dim_q)
    return model, theta, euclid


def _one_cell(cfg, run_id, d, n, m):
    rng = np.random.default_rng((cfg.seed, run_id))
    model, theta, euclid = draw_instance(cfg.model, d, rng)
    if model.exact_wng is None:
        raise OracleUnavailableError(
            f"model {cfg.model!r} has no exact oracle at d={d}"
        )
    exact = model.exact_wng(theta, euclid)
    start = time.perf_counter()
    try:
        result = estimate(
            model, theta, cfg.kernel, cfg.estimator_config(), n, m, rng, euclid
        )
        rel = float(np.linalg.norm(result.values - exact) / np.linalg.norm(exact))
    except KwngError:
        rel = float("nan")
    wall = time.perf_counter() - start
    return ExperimentRecord(
        run_id=run_id, model=cfg.model, d=d, q=model.dim_q, n=n, m=m,
        sigma0=cfg.kernel.sigma0, epsilon=cfg.epsilon, lam=cfg.lam,
        rel_error=rel, wall_seconds=wall,
    )


def _tasks(cfg):
    run_id = 0
    for d in cfg.dims:
        for n in cfg.samples:
            for m in basis_sizes(cfg.basis_rule, d, n):
                for _ in range(cfg.runs):
                    yield run_id, d, n, m
                    run_id += 1


def run_error_sweep(cfg):
    """Execute every cell of the sweep grid; returns records sorted by run_id."""
    tasks = list(_tasks(cfg))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            records = list(pool.map(lambda t: _one_cell(cfg, *t), tasks))
    else:
        records = [_one_cell(cfg, *t) for t in tasks]
    return sorted(records, key=lambda r: r.run_id)


def run_bandwidth_sweep(cfg, sigma_grid):
    """Error sweep with the bandwidth fixed at each grid value in turn.

    The grid value is stored in the sigma0 column (fixed policy with unit
    multiplier), so a single-point grid reduces to a plain sweep cell.
    """
    records = []
    offset = 0
    for sig in sigma_grid:
        sub = dataclasses.replace(
            cfg,
            kernel=dataclasses.replace(
                cfg.kernel, sigma0=float(sig), bandwidth="fixed", fixed_value=1.0
            ),
        )
        for rec in run_error_sweep(sub):
            records.append(dataclasses.replace(rec, run_id=rec.run_id + offset))
        offset = records[-1].run_id + 1 if records else 0
    return records


def median_by(records, key):
    """Median rel_error of successful records, grouped by an attribute."""
    groups = {}
    for rec in records:
        if not rec.failed:
            groups.setdefault(getattr(rec, key), []).append(rec.rel_error)
    return {k: float(np.median(v)) for k, v in sorted(groups.items())}
