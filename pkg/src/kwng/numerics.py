"""Dense linear-algebra substrate.

Symmetric eigenvalue-based SVD, tolerance-controlled pseudo-inverses,
Lyapunov solves in the eigenbasis, PSD square roots and a small PCA
helper.  Everything here is a pure function of ndarray inputs and is
safe to call concurrently.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCloudError,
    NoConvergenceError,
    NonFiniteError,
    SingularSigmaError,
)

EPS = np.finfo(float).eps


def default_rtol(n):
    """Default relative cutoff for rank decisions on an n x n problem."""
    return n * EPS


def check_finite(a, name="array"):
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return a


@dataclass(frozen=True)
class SvdFactors:
    """Orthogonal factor, non-negative spectrum (descending) and rank."""

    U: np.ndarray
    S: np.ndarray
    rank: int


def svd_sym(A, rtol=None):
    """Eigen-factorization of a symmetric PSD matrix as A = U diag(S) U^T.

    S is sorted descending and clipped at zero; rank counts entries above
    rtol * max(S).  Round-off negative eigenvalues are treated as zero.
    """
    A = check_finite(A, "A")
    n = A.shape[0]
    if rtol is None:
        rtol = default_rtol(n)
    try:
        vals, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"symmetric eigendecomposition failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    S = np.maximum(vals[order], 0.0)
    U = vecs[:, order]
    smax = S[0] if n else 0.0
    rank = int(np.count_nonzero(S > rtol * smax)) if smax > 0 else 0
    return SvdFactors(U=U, S=S, rank=rank)


def pinv_psd(A, rtol=None):
    """Moore-Penrose pseudo-inverse of a symmetric PSD matrix.

    Eigenvalues below rtol * max are treated as exactly zero.
    """
    f = svd_sym(A, rtol=rtol)
    smax = f.S[0] if f.S.size else 0.0
    if rtol is None:
        rtol = default_rtol(A.shape[0])
    inv = np.where(f.S > rtol * smax, 1.0 / np.where(f.S > 0, f.S, 1.0), 0.0)
    return (f.U * inv) @ f.U.T


def pinv_apply(A, b, rtol=None):
    """pinv_psd(A) @ b without forming the inverse explicitly."""
    f = svd_sym(A, rtol=rtol)
    smax = f.S[0] if f.S.size else 0.0
    if rtol is None:
        rtol = default_rtol(A.shape[0])
    inv = np.where(f.S > rtol * smax, 1.0 / np.where(f.S > 0, f.S, 1.0), 0.0)
    return f.U @ (inv[:, None] * (f.U.T @ b)) if b.ndim > 1 else f.U @ (inv * (f.U.T @ b))


def eig_floor_for(Sigma):
    """Positive-definiteness floor, scaled to the matrix trace."""
    d = Sigma.shape[0]
    return 1e-12 * np.trace(Sigma) / d


def lyapunov_solve(Sigma, S, eig_floor=None):
    """Solve S = A @ Sigma + Sigma @ A for symmetric A, Sigma SPD.

    Works in Sigma's eigenbasis where the solution is entrywise
    S_ab / (lam_a + lam_b).
    """
    Sigma = check_finite(Sigma, "Sigma")
    S = check_finite(S, "S")
    lam, V = np.linalg.eigh(Sigma)
    if eig_floor is None:
        eig_floor = eig_floor_for(Sigma)
    if lam.min() <= eig_floor:
        raise SingularSigmaError(
            f"min eigenvalue {lam.min():.3e} <= floor {eig_floor:.3e}"
        )
    St = V.T @ S @ V
    At = St / (lam[:, None] + lam[None, :])
    A = V @ At @ V.T
    return 0.5 * (A + A.T)


def sqrtm_psd(Sigma, eig_floor=None):
    """Symmetric PSD square root via eigendecomposition."""
    Sigma = check_finite(Sigma, "Sigma")
    lam, V = np.linalg.eigh(Sigma)
    if eig_floor is not None and lam.min() <= eig_floor:
        raise SingularSigmaError(
            f"min eigenvalue {lam.min():.3e} <= floor {eig_floor:.3e}"
        )
    root = (V * np.sqrt(np.maximum(lam, 0.0))) @ V.T
    return 0.5 * (root + root.T)


@dataclass(frozen=True)
class PcaPlane:
    """Mean and top-2 orthonormal directions of a point cloud."""

    mean: np.ndarray
    basis: np.ndarray  # (2, q)
    degenerate: bool

    def project(self, points):
        return (np.asarray(points, dtype=float) - self.mean) @ self.basis.T


def pca_top2(points):
    """Top-2 principal directions of a cloud of q-vectors.

    Needs at least 3 points.  A rank-deficient covariance returns the
    leading direction plus an arbitrary orthogonal completion, flagged
    via ``degenerate``.
    """
    P = check_finite(np.atleast_2d(points), "points")
    n, q = P.shape
    if n < 3:
        raise DegenerateCloudError(f"need >= 3 points, got {n}")
    mean = P.mean(axis=0)
    X = P - mean
    cov = (X.T @ X) / (n - 1)
    f = svd_sym(cov)
    degenerate = f.rank < 2
    basis = f.U[:, :2].T.copy()
    if degenerate:
        # complete with any unit vector orthogonal to the leading direction
        lead = f.U[:, 0]
        cand = np.eye(q)[np.argmin(np.abs(lead))]
        second = cand - lead * (lead @ cand)
        nrm = np.linalg.norm(second)
        if nrm == 0.0:
            second = np.eye(q)[1 % q]
            nrm = 1.0
        basis[1] = second / nrm
    return PcaPlane(mean=mean, basis=basis, degenerate=degenerate)
