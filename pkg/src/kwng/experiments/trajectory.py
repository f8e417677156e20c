"""Descent-trajectory comparison on the normal family.

Runs Euclidean, exact natural-gradient and kernel-estimated descent from
the same start on the squared Wasserstein-2 loss to a fixed target, then
projects all three parameter trajectories onto the top-2 principal
directions of the exact natural-gradient path.
"""

import csv
from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..estimator import EstimatorConfig
from ..kernels import KernelSpec
from ..models import GaussianParams, bures_loss_and_grad, make_gaussian_model, vech
from ..numerics import pca_top2
from ..optimizer import DescentConfig, DescentTrace, run_descent

DEFAULT_GAMMAS = {"kwng": 0.1, "exact_wng": 0.1, "euclidean": 1e-4}


@dataclass
class TrajectoryResult:
    traces: Dict[str, DescentTrace]
    projections: Dict[str, np.ndarray]
    target: np.ndarray


def default_start(d):
    """Standard normal start: zero mean, identity covariance."""
    return np.concatenate([np.zeros(d), vech(np.eye(d))])


def draw_target(d, rng):
    """Random, moderately conditioned target parameters."""
    mu = rng.standard_normal(d)
    Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
    Sigma = Q @ np.diag(rng.uniform(0.5, 2.0, size=d)) @ Q.T
    return np.concatenate([mu, vech(Sigma)])


def run_trajectory(
    d=10,
    steps=200,
    seed=0,
    methods=("exact_wng", "kwng", "euclidean"),
    gammas=None,
    n_samples=128,
    n_basis=100,
    epsilon=1e-10,
    lam=0.0,
    damping="ttildecols",
    clip_norm=None,
    kernel=None,
):
    """Run the three descent variants and project them on a common plane."""
    gammas = dict(DEFAULT_GAMMAS, **(gammas or {}))
    kernel = kernel or KernelSpec(bandwidth="meansq")
    model = make_gaussian_model(d)
    ss = np.random.SeedSequence(seed)
    target_rng, *method_rngs = [np.random.default_rng(s) for s in ss.spawn(len(methods) + 1)]
    target = draw_target(d, target_rng)
    target_params = GaussianParams.from_vector(target, d)

    def loss(theta):
        return bures_loss_and_grad(GaussianParams.from_vector(theta, d), target_params)

    config = DescentConfig(
        kernel=kernel,
        estimator=EstimatorConfig(epsilon=epsilon, lam=lam, damping=damping),
        n_samples=n_samples,
        n_basis=n_basis,
        clip_norm=clip_norm,
    )
    theta0 = default_start(d)
    traces = {}
    for method, rng in zip(methods, method_rngs):
        traces[method] = run_descent(
            model, loss, method, theta0, steps, gammas[method], config, rng
        )

    reference = "exact_wng" if "exact_wng" in traces else next(iter(traces))
    plane = pca_top2(traces[reference].theta_array)
    projections = {m: plane.project(tr.theta_array) for m, tr in traces.items()}
    return TrajectoryResult(traces=traces, projections=projections, target=target)


def write_trajectory_csv(path, result):
    """One row per (method, iteration) with loss, norms and projections."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "method", "iteration", "loss", "grad_norm", "direction_norm",
            "epsilon", "step_size", "pc1", "pc2",
        ])
        for method, tr in result.traces.items():
            proj = result.projections[method]
            for i, it in enumerate(tr.iterations):
                writer.writerow([
                    method, it,
                    f"{tr.losses[i]:.17g}", f"{tr.grad_norms[i]:.17g}",
                    f"{tr.direction_norms[i]:.17g}", f"{tr.epsilons[i]:.17g}",
                    f"{tr.step_sizes[i]:.17g}",
                    f"{proj[i, 0]:.17g}", f"{proj[i, 1]:.17g}",
                ])
