"""Multivariate log-normal model: componentwise exp of the normal pushforward.

Ships without a closed-form natural-gradient oracle in general; in one
dimension the metric is computed by quadrature and inverted exactly.
"""

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from ..errors import DimensionUnsupportedError
from ..numerics import sqrtm_psd
from .base import GaussianParams, ModelSpec
from .gaussian import _sqrt_sensitivities

_QUAD_NODES = 201


def lognormal_sample(params, z):
    Sigma = params.require_pd()
    R = sqrtm_psd(Sigma)
    return np.exp(R @ np.asarray(z, dtype=float) + params.mu)


def lognormal_jacobian(params, z):
    """Chain rule through the exponential: diag(x) times the normal Jacobian."""
    from .gaussian import gaussian_jacobian

    x = lognormal_sample(params, z)
    return x[:, None] * gaussian_jacobian(params, z)


def lognormal_metric_1d(params):
    """2x2 Wasserstein information matrix of the scalar log-normal.

    The pushforward h(z) = exp(sqrt(s) z + mu) is monotone in z, so the
    optimal displacement between nearby parameters is carried by the map
    itself and the metric reduces to E[dh/dtheta_i dh/dtheta_j] under the
    latent normal.  Evaluated with Gauss-Hermite quadrature, which is
    accurate far beyond 1e-8 for these entire integrands.
    """
    if params.dim != 1:
        raise DimensionUnsupportedError("quadrature oracle is 1-D only")
    s = float(params.s[0])
    mu = float(params.mu[0])
    if s <= 0.0:
        raise DimensionUnsupportedError("scale parameter must be positive")
    nodes, weights = hermegauss(_QUAD_NODES)
    weights = weights / np.sqrt(2.0 * np.pi)
    h = np.exp(np.sqrt(s) * nodes + mu)
    d_mu = h
    d_s = h * nodes / (2.0 * np.sqrt(s))
    G = np.empty((2, 2))
    G[0, 0] = np.sum(weights * d_mu * d_mu)
    G[0, 1] = G[1, 0] = np.sum(weights * d_mu * d_s)
    G[1, 1] = np.sum(weights * d_s * d_s)
    return G


def lognormal_exact_wng_1d(params, euclid):
    """Invert the quadrature metric against the Euclidean gradient."""
    G = lognormal_metric_1d(params)
    return np.linalg.solve(G, np.asarray(euclid, dtype=float))


def make_lognormal_model(d):
    from .gaussian import make_gaussian_model

    normal = make_gaussian_model(d)

    def sample(theta, Z):
        return np.exp(normal.sample(theta, Z))

    def jacobian(theta, Z):
        params = GaussianParams.from_vector(theta, d)
        Sigma = params.require_pd()
        R, DR = _sqrt_sensitivities(Sigma)
        X = np.exp(Z @ R.T + params.mu)
        n = Z.shape[0]
        jac = np.empty((n, d, normal.dim_q))
        jac[:, :, :d] = np.eye(d)
        jac[:, :, d:] = np.einsum("kij,nj->nik", DR, Z)
        return X[:, :, None] * jac

    exact = None
    if d == 1:
        def exact(theta, euclid):
            return lognormal_exact_wng_1d(GaussianParams.from_vector(theta, 1), euclid)

    return ModelSpec(
        name="lognormal",
        dim_d=d,
        dim_q=normal.dim_q,
        latent_dim=d,
        sample=sample,
        jacobian=jacobian,
        exact_wng=exact,
        feasible=normal.feasible,
    )
