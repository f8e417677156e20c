"""Kernel families with analytic first and mixed second derivatives.

Two stationary families are provided, both parametrized by a *squared*
length scale ``sigma``:

  gaussian:  k(x, y) = exp(-||x - y||^2 / (2 sigma))
  rq:        k(x, y) = (1 + ||x - y||^2 / (2 a sigma))^(-a)

so that the mean-squared-distance bandwidth heuristic plugs in with
consistent units.  The rational quadratic tends to the gaussian as the
exponent ``a`` grows.  Derivatives are hand-coded; the test-suite guards
every formula with central finite differences.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptySetError, NonFiniteError, ZeroSpreadError
from .numerics import check_finite

FAMILIES = ("gaussian", "rq")
BANDWIDTH_POLICIES = ("fixed", "meansq", "median")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth policy.

    sigma0 is a positive prefactor multiplying whatever the policy
    resolves; ``fixed_value`` is only read for the "fixed" policy.
    rq_alpha is the rational-quadratic exponent (unused for gaussian).
    """

    family: str = "gaussian"
    sigma0: float = 1.0
    rq_alpha: float = 1.0
    bandwidth: str = "meansq"
    fixed_value: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.bandwidth not in BANDWIDTH_POLICIES:
            raise ValueError(f"unknown bandwidth policy {self.bandwidth!r}")
        if self.sigma0 <= 0:
            raise ValueError("sigma0 must be positive")
        if self.rq_alpha <= 0:
            raise ValueError("rq_alpha must be positive")


def resolve_bandwidth(spec, samples, basis):
    """Resolve the squared length scale from data.

    meansq: sigma0 times the mean squared distance between the sample
    points and the basis points; median: sigma0 times the median squared
    distance; fixed: sigma0 times the configured value.
    """
    X = check_finite(np.atleast_2d(samples), "samples")
    Y = check_finite(np.atleast_2d(basis), "basis")
    if X.size == 0 or Y.size == 0:
        raise EmptySetError("bandwidth resolution needs non-empty point sets")
    if spec.bandwidth == "fixed":
        sigma = spec.sigma0 * spec.fixed_value
    else:
        sq = np.sum((X[:, None, :] - Y[None, :, :]) ** 2, axis=2)
        agg = np.mean(sq) if spec.bandwidth == "meansq" else np.median(sq)
        sigma = spec.sigma0 * agg
    if sigma <= 0.0:
        raise ZeroSpreadError("resolved bandwidth is zero (all distances vanish)")
    return float(sigma)


def _sqdist(x, y):
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return diff, float(np.dot(diff, diff))


def k_eval(spec, sigma, x, y):
    """Kernel value; symmetric in (x, y) and equal to 1 at x = y."""
    diff, sq = _sqdist(x, y)
    if not np.isfinite(sq):
        raise NonFiniteError("non-finite kernel input")
    if spec.family == "gaussian":
        return float(np.exp(-sq / (2.0 * sigma)))
    a = spec.rq_alpha
    return float((1.0 + sq / (2.0 * a * sigma)) ** (-a))


def k_dx(spec, sigma, x, y):
    """Gradient of k with respect to its first argument."""
    diff, sq = _sqdist(x, y)
    if not np.isfinite(sq):
        raise NonFiniteError("non-finite kernel input")
    if spec.family == "gaussian":
        return -(diff / sigma) * np.exp(-sq / (2.0 * sigma))
    a = spec.rq_alpha
    base = 1.0 + sq / (2.0 * a * sigma)
    return -(diff / sigma) * base ** (-a - 1.0)


def k_dxdy(spec, sigma, x, y):
    """Matrix of mixed partials d^2 k / dx_i dy_j.

    For both families this equals delta_ij * g1 - diff_i * diff_j * g2
    with family-specific radial coefficients; at x = y it reduces to
    I / sigma.
    """
    diff, sq = _sqdist(x, y)
    if not np.isfinite(sq):
        raise NonFiniteError("non-finite kernel input")
    g1, g2 = _radial_coeffs(spec, sigma, np.asarray(sq))
    d = diff.shape[0]
    return float(g1) * np.eye(d) - float(g2) * np.outer(diff, diff)


def _radial_coeffs(spec, sigma, sq):
    """Coefficients (g1, g2) of the mixed second derivative.

    d^2 k / dx_i dy_j = delta_ij * g1(r^2) - (x-y)_i (x-y)_j * g2(r^2).
    """
    if spec.family == "gaussian":
        k = np.exp(-sq / (2.0 * sigma))
        return k / sigma, k / sigma**2
    a = spec.rq_alpha
    base = 1.0 + sq / (2.0 * a * sigma)
    g1 = base ** (-a - 1.0) / sigma
    g2 = (a + 1.0) / (a * sigma**2) * base ** (-a - 2.0)
    return g1, g2


def mixed_second_diag_constant(spec, sigma):
    """Analytic value of d^2 k / dx_i dy_i at x = y (both families 1/sigma)."""
    return 1.0 / sigma


def mixed_second_rows(spec, sigma, Y, idx, X):
    """Rows of mixed second derivatives against a point batch.

    Returns an (M, N, d) array whose (m, n, j) entry is the partial
    derivative of k first w.r.t. coordinate idx[m] of the first argument
    and then w.r.t. coordinate j of the second, evaluated at (Y[m], X[n]).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    idx = np.asarray(idx, dtype=int)
    diff = Y[:, None, :] - X[None, :, :]              # (M, N, d)
    sq = np.einsum("mnd,mnd->mn", diff, diff)
    g1, g2 = _radial_coeffs(spec, sigma, sq)          # (M, N)
    dm = np.take_along_axis(diff, idx[:, None, None], axis=2)[:, :, 0]  # (M, N)
    out = -(dm * g2)[:, :, None] * diff               # (M, N, d)
    rows = np.arange(Y.shape[0])
    out[rows, :, idx] += g1[rows, :]
    return out


def mixed_second_pairs(spec, sigma, Y, idx):
    """Gram matrix of mixed second derivatives among the basis points.

    Entry (m, m') pairs coordinate idx[m] of the first argument with
    coordinate idx[m'] of the second, at (Y[m], Y[m']).  Symmetric by
    the symmetry of mixed partials of a stationary kernel.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    idx = np.asarray(idx, dtype=int)
    diff = Y[:, None, :] - Y[None, :, :]
    sq = np.einsum("mnd,mnd->mn", diff, diff)
    g1, g2 = _radial_coeffs(spec, sigma, sq)
    da = np.take_along_axis(diff, idx[:, None, None], axis=2)[:, :, 0]   # diff_{i_m}
    db = np.take_along_axis(diff, idx[None, :, None], axis=2)[:, :, 0]   # diff_{i_m'}
    same = idx[:, None] == idx[None, :]
    K = np.where(same, g1, 0.0) - da * db * g2
    return 0.5 * (K + K.T)
