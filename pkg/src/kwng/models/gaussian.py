"""Multivariate normal model with exact natural-gradient oracles.

The model pushes a standard normal latent through x = R z + mu where R is
the symmetric PSD square root of the covariance.  Parameters are the mean
stacked with the vech of the covariance, q = d + d(d+1)/2.
"""

import numpy as np

from ..numerics import eig_floor_for, lyapunov_solve, sqrtm_psd
from .base import (
    GaussianParams,
    ModelSpec,
    unvech,
    vech,
    vech_basis_matrix,
    vech_dim,
)


def gaussian_sample(params, z):
    """Push one latent vector through the model: R z + mu."""
    Sigma = params.require_pd()
    R = sqrtm_psd(Sigma)
    return R @ np.asarray(z, dtype=float) + params.mu


def _sqrt_sensitivities(Sigma):
    """Derivatives of the PSD square root w.r.t. each vech coordinate.

    Differentiating Sigma = R R gives E_k = dR R + R dR, a Lyapunov
    problem in R for each symmetric basis matrix E_k.
    """
    d = Sigma.shape[0]
    R = sqrtm_psd(Sigma, eig_floor=eig_floor_for(Sigma))
    p = vech_dim(d)
    DR = np.empty((p, d, d))
    lam, V = np.linalg.eigh(R)
    denom = lam[:, None] + lam[None, :]
    for k in range(p):
        E = vech_basis_matrix(d, k)
        DR[k] = V @ ((V.T @ E @ V) / denom) @ V.T
    return R, DR


def gaussian_jacobian(params, z):
    """d x q Jacobian of the pushforward at latent z.

    The mean block is the identity; column for s_k is (dR/ds_k) z.
    """
    Sigma = params.require_pd()
    d = params.dim
    R, DR = _sqrt_sensitivities(Sigma)
    z = np.asarray(z, dtype=float)
    return np.concatenate([np.eye(d), np.einsum("kij,j->ik", DR, z)], axis=1)


def gaussian_exact_wng(params, euclid):
    """Closed-form natural gradient for the Wasserstein geometry.

    The mean block passes through; the covariance block maps the vech
    gradient g to vech(Sigma M + M Sigma) with M = A + Diag(diag(A)) and
    A = unvech(g).  The diagonal correction compensates the vech
    double-counting of off-diagonal entries; gaussian_metric_apply
    inverts this map exactly.
    """
    Sigma = params.require_pd()
    d = params.dim
    euclid = np.asarray(euclid, dtype=float)
    g_mu, g_s = euclid[:d], euclid[d:]
    A = unvech(g_s)
    M = A + np.diag(np.diag(A))
    return np.concatenate([g_mu, vech(Sigma @ M + M @ Sigma)])


def gaussian_metric_apply(params, u):
    """Apply the Wasserstein information matrix to a tangent vector.

    Pairing two tangents (m, vech(S)) and (m', vech(S')) gives
    m.m' + trace(A Sigma A') where S = A Sigma + Sigma A and likewise
    for A'.  The covariance block is assembled against the vech basis
    through Lyapunov solves.
    """
    Sigma = params.require_pd()
    d = params.dim
    u = np.asarray(u, dtype=float)
    u_mu, u_s = u[:d], u[d:]
    p = vech_dim(d)
    A_u = lyapunov_solve(Sigma, unvech(u_s))
    w = np.empty(p)
    for k in range(p):
        A_k = lyapunov_solve(Sigma, vech_basis_matrix(d, k))
        w[k] = np.trace(A_k @ Sigma @ A_u)
    return np.concatenate([u_mu, w])


def bures_loss_and_grad(params, target):
    """Squared Wasserstein-2 distance to a fixed normal target.

    loss = ||mu - mu*||^2 + tr(Sigma) + tr(Sigma*) - 2 tr((S^1/2 S* S^1/2)^1/2)

    The covariance gradient is I - T with T the optimal linear transport
    map Sigma^-1/2 (Sigma^1/2 Sigma* Sigma^1/2)^1/2 Sigma^-1/2, converted
    to vech coordinates (off-diagonal entries doubled).
    """
    Sigma = params.require_pd()
    Sigma_t = target.require_pd()
    d = params.dim
    A = sqrtm_psd(Sigma)
    cross = sqrtm_psd(A @ Sigma_t @ A)
    dmu = params.mu - target.mu
    loss = float(dmu @ dmu + np.trace(Sigma) + np.trace(Sigma_t) - 2.0 * np.trace(cross))

    lam, V = np.linalg.eigh(A)
    Ainv = (V / lam) @ V.T
    T = Ainv @ cross @ Ainv
    G = np.eye(d) - 0.5 * (T + T.T)
    grad_s = vech(2.0 * G - np.diag(np.diag(G)))
    return loss, np.concatenate([2.0 * dmu, grad_s])


def _pd_check(theta, d):
    try:
        GaussianParams.from_vector(theta, d).require_pd()
        return True
    except Exception:
        return False


def make_gaussian_model(d):
    """ModelSpec for the d-dimensional normal family."""
    q = d + vech_dim(d)

    def sample(theta, Z):
        params = GaussianParams.from_vector(theta, d)
        Sigma = params.require_pd()
        R = sqrtm_psd(Sigma)
        return Z @ R.T + params.mu

    def jacobian(theta, Z):
        params = GaussianParams.from_vector(theta, d)
        Sigma = params.require_pd()
        _, DR = _sqrt_sensitivities(Sigma)
        n = Z.shape[0]
        jac = np.empty((n, d, q))
        jac[:, :, :d] = np.eye(d)
        jac[:, :, d:] = np.einsum("kij,nj->nik", DR, Z)
        return jac

    def exact(theta, euclid):
        return gaussian_exact_wng(GaussianParams.from_vector(theta, d), euclid)

    return ModelSpec(
        name="gaussian",
        dim_d=d,
        dim_q=q,
        latent_dim=d,
        sample=sample,
        jacobian=jacobian,
        exact_wng=exact,
        feasible=lambda theta: _pd_check(theta, d),
    )
