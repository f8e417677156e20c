"""Shared model machinery: vech coordinates, parameter containers, ModelSpec."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import SingularSigmaError
from ..numerics import check_finite, eig_floor_for


def vech(S):
    """Half-vectorization: row-major lower triangle including the diagonal."""
    S = np.asarray(S, dtype=float)
    d = S.shape[0]
    return np.concatenate([S[a, : a + 1] for a in range(d)]) if d else np.zeros(0)


def unvech(s):
    """Inverse of vech; mirrors the lower triangle across the diagonal."""
    s = np.asarray(s, dtype=float)
    p = s.shape[0]
    d = int(round((np.sqrt(8.0 * p + 1.0) - 1.0) / 2.0))
    if d * (d + 1) // 2 != p:
        raise ValueError(f"length {p} is not a triangular number")
    S = np.zeros((d, d))
    il = np.tril_indices(d)
    S[il] = s
    S[(il[1], il[0])] = s
    return S


def vech_dim(d):
    return d * (d + 1) // 2


def vech_basis_matrix(d, k):
    """Symmetric matrix dual to the k-th vech coordinate.

    E_aa for a diagonal slot, E_ab + E_ba for an off-diagonal one; this is
    the derivative of unvech(s) w.r.t. s_k.
    """
    il = np.tril_indices(d)
    a, b = il[0][k], il[1][k]
    E = np.zeros((d, d))
    E[a, b] = 1.0
    E[b, a] = 1.0
    return E


@dataclass(frozen=True)
class GaussianParams:
    """Mean vector plus vech of the covariance."""

    mu: np.ndarray
    s: np.ndarray

    @property
    def dim(self):
        return self.mu.shape[0]

    @property
    def sigma(self):
        return unvech(self.s)

    def to_vector(self):
        return np.concatenate([self.mu, self.s])

    @classmethod
    def from_vector(cls, theta, d):
        theta = np.asarray(theta, dtype=float)
        return cls(mu=theta[:d].copy(), s=theta[d:].copy())

    def require_pd(self, eig_floor=None):
        Sigma = self.sigma
        if eig_floor is None:
            eig_floor = eig_floor_for(Sigma)
        w = np.linalg.eigvalsh(Sigma)
        if w.min() <= eig_floor:
            raise SingularSigmaError(
                f"covariance min eigenvalue {w.min():.3e} <= floor {eig_floor:.3e}"
            )
        return Sigma


@dataclass(frozen=True)
class SphereParams:
    """Center and radius of a uniform hypersphere distribution."""

    c: np.ndarray
    r: float

    def to_vector(self):
        return np.concatenate([self.c, [self.r]])

    @classmethod
    def from_vector(cls, theta, d):
        theta = np.asarray(theta, dtype=float)
        return cls(c=theta[:d].copy(), r=float(theta[d]))


@dataclass(frozen=True)
class ModelSpec:
    """An implicit model: latent sampler, pushforward and its Jacobian.

    ``sample`` and ``jacobian`` act on a whole latent batch Z of shape
    (N, latent_dim) and return (N, d) samples and (N, d, q) Jacobians.
    ``exact_wng`` maps (theta, euclidean gradient) to the exact natural
    gradient when a closed form or quadrature oracle exists, else None.
    ``feasible`` guards parameter constraints (e.g. covariance PD) for
    the optimizer's backtracking.
    """

    name: str
    dim_d: int
    dim_q: int
    latent_dim: int
    sample: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exact_wng: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    feasible: Callable[[np.ndarray], bool] = field(default=lambda theta: True)

    def draw_latent(self, rng, n):
        return rng.standard_normal((n, self.latent_dim))

    def validate_theta(self, theta):
        theta = check_finite(np.asarray(theta, dtype=float), "theta")
        if theta.shape != (self.dim_q,):
            raise ValueError(
                f"theta must have shape ({self.dim_q},), got {theta.shape}"
            )
        return theta
