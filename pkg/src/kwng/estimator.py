"""Kernelized natural-gradient estimator with subsampled derivative bases.

The estimator restricts a dual formulation of the Wasserstein metric to
the span of M randomly chosen kernel partial derivatives.  Given samples
X_n from an implicit model, basis points Y_m with coordinate indices i_m,
and the stacked model Jacobians B, the ingredients are

  C[m, (n, i)] = d2 k / dy_{i_m} dx_i (Y_m, X_n)        (M x N d)
  K[m, m']     = d2 k / dy_{i_m} dx_{i_m'} (Y_m, Y_m')  (M x M)
  T            = (1/N) C B                               (M x q)

and the raw estimate of the natural gradient is

  (1/eps) (D^-1 - D^-1 T' Q^+ T D^-1) g,
  Q = T D^-1 T' + lam eps K + (eps/N) C C'

with g the Euclidean gradient and D a positive diagonal damping.  A
numerically stable variant whitens T by the inverse square roots of the
spectrum of C C' before applying the same formula; a quadratic-program
solve over the basis coefficients provides an independent oracle route.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import AllZeroColumnsWarning, EmptyBatchError
from .numerics import check_finite, default_rtol, pinv_apply, pinv_psd, svd_sym

DAMPING_MODES = ("identity", "tcols", "ttildecols")

# memory cap per assembly block, in float64 entries
_BLOCK_ENTRIES = 8_000_000


@dataclass(frozen=True)
class NystromBasis:
    """Basis points drawn from the sample batch plus one coordinate each."""

    points: np.ndarray  # (M, d)
    idx: np.ndarray     # (M,) ints in [0, d)

    @property
    def size(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class SampleBatch:
    """Latents, pushforward samples and stacked Jacobians (N d x q)."""

    Z: np.ndarray
    X: np.ndarray
    B: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def q(self):
        return self.B.shape[1]


@dataclass(frozen=True)
class EstimatorConfig:
    """Regularization and damping knobs of the estimator."""

    epsilon: float = 1e-5
    lam: float = 0.0
    damping: str = "ttildecols"
    pinv_rtol: Optional[float] = None
    clip_norm: Optional[float] = None
    damping_floor: float = 1e-8

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.damping not in DAMPING_MODES:
            raise ValueError(f"unknown damping mode {self.damping!r}")


@dataclass(frozen=True)
class GradientVector:
    """A parameter-space direction tagged with how it was obtained."""

    values: np.ndarray
    kind: str  # "euclidean" | "natural_exact" | "natural_kwng"

    def __post_init__(self):
        check_finite(self.values, "gradient values")

    @property
    def norm(self):
        return float(np.linalg.norm(self.values))


def sample_basis(X, m, rng):
    """Draw m basis points uniformly with replacement, plus coordinates."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    if n == 0:
        raise EmptyBatchError("cannot sample a basis from an empty batch")
    if m < 1:
        raise ValueError("basis size must be at least 1")
    rows = rng.integers(0, n, size=m)
    idx = rng.integers(0, d, size=m)
    return NystromBasis(points=X[rows].copy(), idx=idx)


def assemble_C(basis, X, kernel_spec, sigma):
    """Mixed second-derivative matrix between basis and samples, M x (N d).

    Columns are ordered sample-major: column n*d + i differentiates the
    kernel's second argument along coordinate i at sample X_n.  Assembled
    in row blocks to bound peak memory.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    m = basis.size
    if basis.points.shape[1] != d:
        raise ValueError("basis and samples have different dimensions")
    C = np.empty((m, n * d))
    block = max(1, _BLOCK_ENTRIES // max(1, n * d))
    for lo in range(0, m, block):
        hi = min(m, lo + block)
        rows = kernels.mixed_second_rows(
            kernel_spec, sigma, basis.points[lo:hi], basis.idx[lo:hi], X
        )
        C[lo:hi] = rows.reshape(hi - lo, n * d)
    return C


def assemble_K(basis, kernel_spec, sigma):
    """Mixed second-derivative Gram matrix among the basis points, M x M."""
    return kernels.mixed_second_pairs(kernel_spec, sigma, basis.points, basis.idx)


def assemble_T(C, batch):
    """Average sensitivity of the basis derivative features to theta.

    Equals the Jacobian of theta -> (1/N) sum_n dk/dy_{i_m}(Y_m, h(Z_n))
    with the basis held fixed, i.e. (1/N) C B for the stacked Jacobians B.
    """
    n = batch.n
    if C.shape[1] != batch.B.shape[0]:
        raise ValueError("C and stacked Jacobians disagree on N*d")
    return (C @ batch.B) / n


def damping_vector(mode, mat, floor=1e-8):
    """Positive diagonal damping from column norms of T or whitened T.

    identity: all ones.  Otherwise Euclidean column norms, each lifted to
    at least floor times the largest norm.  If every column is zero the
    damping falls back to identity with a warning.
    """
    q = mat.shape[1]
    if mode == "identity":
        return np.ones(q)
    if mode not in DAMPING_MODES:
        raise ValueError(f"unknown damping mode {mode!r}")
    norms = np.linalg.norm(mat, axis=0)
    top = norms.max() if q else 0.0
    if top == 0.0:
        warnings.warn(
            "all damping columns are zero; falling back to identity",
            AllZeroColumnsWarning,
        )
        return np.ones(q)
    return np.maximum(norms, floor * top)


def _pinv_rtol(m, rtol):
    return default_rtol(max(m, 1)) if rtol is None else rtol


def kwng_raw(C, K, T, D, eps, lam, n, euclid, pinv_rtol=None):
    """Direct evaluation of the estimator formula.

    K may be None when lam == 0.  Returns the q-vector estimate.
    """
    euclid = np.asarray(euclid, dtype=float)
    Dinv = 1.0 / np.asarray(D, dtype=float)
    if T.shape[0] == 0:
        return (euclid * Dinv) / eps
    rtol = _pinv_rtol(T.shape[0], pinv_rtol)
    bracket = (T * Dinv) @ T.T + (eps / n) * (C @ C.T)
    if lam > 0.0:
        if K is None:
            raise ValueError("lam > 0 requires the basis Gram matrix K")
        bracket = bracket + lam * eps * K
    w = T @ (Dinv * euclid)
    inner = pinv_apply(bracket, w, rtol=rtol)
    return (Dinv * euclid - Dinv * (T.T @ inner)) / eps


def whiten_by_spectrum(C, T, pinv_rtol=None):
    """Whitened sensitivity matrix and range projector of C C'.

    With C C' = U diag(S) U', rows of T in the U basis are rescaled by
    the inverse square roots of S (zero below the cutoff).  This leaves
    the estimator unchanged in exact arithmetic while removing the
    conditioning of the sample Gram; the projector marks retained
    directions.
    """
    m = C.shape[0]
    rtol = _pinv_rtol(m, pinv_rtol)
    f = svd_sym(C @ C.T, rtol=rtol)
    smax = f.S[0] if m else 0.0
    keep = f.S > rtol * smax if smax > 0 else np.zeros(m, dtype=bool)
    w = np.where(keep, 1.0 / np.sqrt(np.where(keep, f.S, 1.0)), 0.0)
    T_tilde = w[:, None] * (f.U.T @ T)
    P = keep.astype(float)
    return T_tilde, P


def kwng_stable_whitened(T_tilde, P, D, eps, n, euclid, pinv_rtol=None):
    """Estimator formula in whitened coordinates (ridge-free path)."""
    euclid = np.asarray(euclid, dtype=float)
    Dinv = 1.0 / np.asarray(D, dtype=float)
    m = T_tilde.shape[0]
    if m == 0:
        return (euclid * Dinv) / eps
    rtol = _pinv_rtol(m, pinv_rtol)
    bracket = (T_tilde * Dinv) @ T_tilde.T + (eps / n) * np.diag(P)
    w = T_tilde @ (Dinv * euclid)
    inner = pinv_apply(bracket, w, rtol=rtol)
    return (Dinv * euclid - Dinv * (T_tilde.T @ inner)) / eps


def kwng_stable(C, T, D, eps, n, euclid, pinv_rtol=None):
    """Numerically stable estimator; only valid for lam == 0."""
    T_tilde, P = whiten_by_spectrum(C, T, pinv_rtol=pinv_rtol)
    return kwng_stable_whitened(T_tilde, P, D, eps, n, euclid, pinv_rtol=pinv_rtol)


def kwng_oracle_quadratic(C, K, T, D, eps, lam, n, euclid, pinv_rtol=None):
    """Independent route through the basis-coefficient quadratic program.

    The optimal function in the subsampled span has coefficients alpha
    minimizing

      (1/N) a' C C' a + lam a' K a + (1/eps) (g + T'a)' D^-1 (g + T'a)

    whose stationarity system is solved by minimum-norm pseudo-inverse;
    the estimate is then reconstructed as (1/eps) D^-1 (g + T' alpha).
    Must agree with kwng_raw to within round-off.
    """
    euclid = np.asarray(euclid, dtype=float)
    Dinv = 1.0 / np.asarray(D, dtype=float)
    if T.shape[0] == 0:
        return (euclid * Dinv) / eps
    rtol = _pinv_rtol(T.shape[0], pinv_rtol)
    A = (eps / n) * (C @ C.T) + (T * Dinv) @ T.T
    if lam > 0.0:
        if K is None:
            raise ValueError("lam > 0 requires the basis Gram matrix K")
        A = A + eps * lam * K
    rhs = -(T @ (Dinv * euclid))
    alpha = pinv_apply(A, rhs, rtol=rtol)
    return (Dinv * (euclid + T.T @ alpha)) / eps


def metric_estimate(C, K, T, lam, n, pinv_rtol=None):
    """Low-rank estimate of the information matrix, T' (lam K + C C'/N)^+ T."""
    m = T.shape[0]
    if m == 0:
        return np.zeros((T.shape[1], T.shape[1]))
    rtol = _pinv_rtol(m, pinv_rtol)
    E = (C @ C.T) / n
    if lam > 0.0:
        E = E + lam * K
    return T.T @ pinv_psd(E, rtol=rtol) @ T


def kwng_from_metric(C, K, T, D, eps, lam, n, euclid, pinv_rtol=None):
    """Consistency route: solve (eps D + G) x = g with the metric estimate."""
    euclid = np.asarray(euclid, dtype=float)
    G = metric_estimate(C, K, T, lam, n, pinv_rtol=pinv_rtol)
    lhs = G + eps * np.diag(np.asarray(D, dtype=float))
    return np.linalg.solve(lhs, euclid)


def clip_by_norm(values, max_norm):
    """Rescale to the given Euclidean norm if it is exceeded."""
    values = np.asarray(values, dtype=float)
    if max_norm <= 0:
        raise ValueError("max_norm must be positive")
    nrm = np.linalg.norm(values)
    if nrm <= max_norm:
        return values.copy()
    return values * (max_norm / nrm)


def draw_batch(model, theta, n, rng):
    """Sample latents, push them through the model and stack Jacobians."""
    if n < 1:
        raise EmptyBatchError("batch size must be at least 1")
    theta = model.validate_theta(theta)
    Z = model.draw_latent(rng, n)
    X = model.sample(theta, Z)
    jac = model.jacobian(theta, Z)
    B = jac.reshape(n * model.dim_d, model.dim_q)
    return SampleBatch(Z=Z, X=X, B=B)


def estimate(model, theta, kernel_spec, config, n_samples, n_basis, rng, euclid):
    """End-to-end natural-gradient estimate for an implicit model.

    Draws a fresh batch, samples the derivative basis, resolves the
    bandwidth, assembles the matrices and applies the stable estimator
    (the direct formula when lam > 0).  Deterministic for a given rng
    state; the rng is consumed in the order batch then basis.
    """
    euclid = np.asarray(euclid, dtype=float)
    batch = draw_batch(model, theta, n_samples, rng)
    basis = sample_basis(batch.X, n_basis, rng)
    sigma = kernels.resolve_bandwidth(kernel_spec, batch.X, basis.points)
    C = assemble_C(basis, batch.X, kernel_spec, sigma)
    T = assemble_T(C, batch)
    rtol = config.pinv_rtol

    if config.lam > 0.0:
        K = assemble_K(basis, kernel_spec, sigma)
        if config.damping == "ttildecols":
            T_tilde, _ = whiten_by_spectrum(C, T, pinv_rtol=rtol)
            D = damping_vector("ttildecols", T_tilde, config.damping_floor)
        else:
            D = damping_vector(config.damping, T, config.damping_floor)
        values = kwng_raw(
            C, K, T, D, config.epsilon, config.lam, batch.n, euclid, pinv_rtol=rtol
        )
    else:
        T_tilde, P = whiten_by_spectrum(C, T, pinv_rtol=rtol)
        source = T_tilde if config.damping == "ttildecols" else T
        D = damping_vector(config.damping, source, config.damping_floor)
        values = kwng_stable_whitened(
            T_tilde, P, D, config.epsilon, batch.n, euclid, pinv_rtol=rtol
        )

    if config.clip_norm is not None:
        values = clip_by_norm(values, config.clip_norm)
    return GradientVector(values=values, kind="natural_kwng")
