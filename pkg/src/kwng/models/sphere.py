"""Uniform distribution on a hypersphere, as a pushforward model.

x = c + r z/||z|| with a standard normal latent z; parameters are the
center and the radius, q = d + 1.  The model has no density, but its
Wasserstein geometry is flat: translating the center moves every point
by the same vector and scaling the radius moves points radially, the
corresponding tangent fields e_i and (x - c)/r are gradients, mutually
orthonormal in L2 of the sphere, so the information matrix is the
identity and the natural gradient equals the Euclidean one.
"""

import numpy as np

from ..errors import DegenerateLatentError
from .base import ModelSpec, SphereParams


def sphere_sample(params, z):
    z = np.asarray(z, dtype=float)
    nrm = np.linalg.norm(z)
    if nrm == 0.0:
        raise DegenerateLatentError("latent draw has zero norm")
    return params.c + params.r * z / nrm


def sphere_jacobian(params, z):
    """d x (d+1) Jacobian: identity block for the center, z/||z|| for r."""
    z = np.asarray(z, dtype=float)
    nrm = np.linalg.norm(z)
    if nrm == 0.0:
        raise DegenerateLatentError("latent draw has zero norm")
    d = z.shape[0]
    return np.concatenate([np.eye(d), (z / nrm)[:, None]], axis=1)


def sphere_exact_wng(params, euclid):
    """Identity information matrix: the natural gradient is the input."""
    return np.asarray(euclid, dtype=float).copy()


def make_sphere_model(d):
    def sample(theta, Z):
        p = SphereParams.from_vector(theta, d)
        nrm = np.linalg.norm(Z, axis=1)
        if np.any(nrm == 0.0):
            raise DegenerateLatentError("latent draw has zero norm")
        return p.c + p.r * Z / nrm[:, None]

    def jacobian(theta, Z):
        nrm = np.linalg.norm(Z, axis=1)
        if np.any(nrm == 0.0):
            raise DegenerateLatentError("latent draw has zero norm")
        n = Z.shape[0]
        jac = np.empty((n, d, d + 1))
        jac[:, :, :d] = np.eye(d)
        jac[:, :, d] = Z / nrm[:, None]
        return jac

    return ModelSpec(
        name="sphere",
        dim_d=d,
        dim_q=d + 1,
        latent_dim=d,
        sample=sample,
        jacobian=jacobian,
        exact_wng=lambda theta, euclid: np.asarray(euclid, dtype=float).copy(),
        feasible=lambda theta: float(theta[d]) > 0.0,
    )
