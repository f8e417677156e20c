"""Shared verification routines used by the self-test and the test-suite.

Each function returns observed error magnitudes; thresholds are applied
by the caller.  Instances are generated from real kernel assemblies over
random point clouds with random stacked Jacobians, never from synthetic
matrices, so the checks exercise the same code paths as production runs.
"""

import numpy as np

from .. import kernels
from ..estimator import (
    NystromBasis,
    SampleBatch,
    assemble_C,
    assemble_K,
    assemble_T,
    damping_vector,
    kwng_from_metric,
    kwng_oracle_quadratic,
    kwng_raw,
    kwng_stable,
    sample_basis,
)
from ..kernels import KernelSpec, k_dx, k_dxdy, k_eval, resolve_bandwidth
from ..models import (
    GaussianParams,
    gaussian_exact_wng,
    gaussian_jacobian,
    gaussian_metric_apply,
    gaussian_sample,
    lognormal_jacobian,
    lognormal_sample,
    sphere_jacobian,
    sphere_sample,
    vech,
)
from ..numerics import svd_sym


def relative_gap(a, b):
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / scale)


def random_assembly(rng, d_max=5, q_max=20, n_max=200, m_max=20,
                    lam_choices=(0.0, 1e-3), eps_choices=(1e-6, 1e-2)):
    """One random estimator instance assembled through the kernel path."""
    d = int(rng.integers(1, d_max + 1))
    q = int(rng.integers(1, q_max + 1))
    n = int(rng.integers(5, n_max + 1))
    m = int(rng.integers(1, min(m_max, n * d) + 1))
    family = "gaussian" if rng.random() < 0.5 else "rq"
    spec = KernelSpec(family=family, sigma0=1.0, bandwidth="meansq")
    X = rng.standard_normal((n, d))
    basis = sample_basis(X, m, rng)
    sigma = resolve_bandwidth(spec, X, basis.points)
    C = assemble_C(basis, X, spec, sigma)
    K = assemble_K(basis, spec, sigma)
    B = rng.standard_normal((n * d, q))
    batch = SampleBatch(Z=np.zeros((n, d)), X=X, B=B)
    T = assemble_T(C, batch)
    mode = "tcols" if rng.random() < 0.5 else "identity"
    D = damping_vector(mode, T)
    lam = float(rng.choice(lam_choices))
    eps = float(rng.choice(eps_choices))
    g = rng.standard_normal(q)
    return dict(C=C, K=K, T=T, D=D, lam=lam, eps=eps, n=n, g=g, m=m)


def oracle_equivalence_errors(count=200, seed=101):
    """Gap between the direct formula and the quadratic-program route."""
    rng = np.random.default_rng(seed)
    gaps = []
    for _ in range(count):
        inst = random_assembly(rng)
        a = kwng_raw(inst["C"], inst["K"], inst["T"], inst["D"],
                     inst["eps"], inst["lam"], inst["n"], inst["g"])
        b = kwng_oracle_quadratic(inst["C"], inst["K"], inst["T"], inst["D"],
                                  inst["eps"], inst["lam"], inst["n"], inst["g"])
        gaps.append(relative_gap(a, b))
    return np.array(gaps)


def representation_errors(count=100, seed=202, cond_cap=1e9):
    """Gap between the direct formula and the inverted metric estimate.

    Only full-rank instances count: the identity between the two routes
    holds exactly when lam K + C C'/N is invertible, so instances whose
    conditioning would make "invertible" a round-off judgement call are
    redrawn.
    """
    rng = np.random.default_rng(seed)
    gaps = []
    while len(gaps) < count:
        inst = random_assembly(rng, m_max=12)
        E = inst["lam"] * inst["K"] + (inst["C"] @ inst["C"].T) / inst["n"]
        f = svd_sym(E)
        if f.rank < inst["m"] or f.S[0] / f.S[f.rank - 1] > cond_cap:
            continue
        a = kwng_raw(inst["C"], inst["K"], inst["T"], inst["D"],
                     inst["eps"], inst["lam"], inst["n"], inst["g"])
        b = kwng_from_metric(inst["C"], inst["K"], inst["T"], inst["D"],
                             inst["eps"], inst["lam"], inst["n"], inst["g"])
        gaps.append(relative_gap(a, b))
    return np.array(gaps)


def stable_agreement_errors(count=100, seed=303, cond_cap=1e6):
    """Gap between the ridge-free whitened path and the direct formula."""
    rng = np.random.default_rng(seed)
    gaps = []
    while len(gaps) < count:
        inst = random_assembly(rng, m_max=12, lam_choices=(0.0,))
        f = svd_sym(inst["C"] @ inst["C"].T)
        if f.rank < inst["m"] or f.S[0] / f.S[f.rank - 1] > cond_cap:
            continue
        a = kwng_raw(inst["C"], None, inst["T"], inst["D"],
                     inst["eps"], 0.0, inst["n"], inst["g"])
        b = kwng_stable(inst["C"], inst["T"], inst["D"],
                        inst["eps"], inst["n"], inst["g"])
        gaps.append(relative_gap(a, b))
    return np.array(gaps)


def metric_inversion_errors(count=100, seed=404, d_max=6):
    """Apply the information matrix to the closed-form natural gradient."""
    rng = np.random.default_rng(seed)
    errs = []
    for _ in range(count):
        d = int(rng.integers(1, d_max + 1))
        Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
        Sigma = Q @ np.diag(rng.uniform(0.3, 3.0, size=d)) @ Q.T
        params = GaussianParams(mu=rng.standard_normal(d), s=vech(Sigma))
        g = rng.standard_normal(d + d * (d + 1) // 2)
        back = gaussian_metric_apply(params, gaussian_exact_wng(params, g))
        errs.append(np.max(np.abs(back - g)) / max(1.0, np.max(np.abs(g))))
    return np.array(errs)


def _fd_grad(f, x, h):
    g = np.zeros_like(x, dtype=float)
    for i in range(x.size):
        e = np.zeros_like(x, dtype=float)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def _fd_mixed(spec, sigma, x, y, h):
    d = x.size
    out = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d); ei[i] = h
        for j in range(d):
            ej = np.zeros(d); ej[j] = h
            out[i, j] = (
                k_eval(spec, sigma, x + ei, y + ej)
                - k_eval(spec, sigma, x + ei, y - ej)
                - k_eval(spec, sigma, x - ei, y + ej)
                + k_eval(spec, sigma, x - ei, y - ej)
            ) / (4.0 * h * h)
    return out


def kernel_derivative_errors(count=100, seed=505):
    """Max relative FD error of k_dx and k_dxdy over random probes."""
    rng = np.random.default_rng(seed)
    worst = {"gaussian_dx": 0.0, "gaussian_dxdy": 0.0, "rq_dx": 0.0, "rq_dxdy": 0.0}
    for family in ("gaussian", "rq"):
        spec = KernelSpec(family=family, rq_alpha=1.0)
        for _ in range(count):
            d = int(rng.integers(1, 5))
            sigma = float(rng.uniform(0.3, 3.0))
            x = rng.standard_normal(d)
            y = x + rng.standard_normal(d) * np.sqrt(sigma)
            h = 1e-5 * max(1.0, np.sqrt(sigma))
            fd = _fd_grad(lambda xx: k_eval(spec, sigma, xx, y), x, h)
            an = k_dx(spec, sigma, x, y)
            scale = max(np.max(np.abs(fd)), np.max(np.abs(an)), 1.0 / sigma)
            worst[f"{family}_dx"] = max(
                worst[f"{family}_dx"], np.max(np.abs(fd - an)) / scale
            )
            fd2 = _fd_mixed(spec, sigma, x, y, h)
            an2 = k_dxdy(spec, sigma, x, y)
            scale2 = max(np.max(np.abs(fd2)), np.max(np.abs(an2)), 1.0 / sigma)
            worst[f"{family}_dxdy"] = max(
                worst[f"{family}_dxdy"], np.max(np.abs(fd2 - an2)) / scale2
            )
    return worst


def model_jacobian_errors(count=100, seed=606):
    """Max relative FD error of each model's analytic Jacobian."""
    rng = np.random.default_rng(seed)
    worst = {"gaussian": 0.0, "sphere": 0.0, "lognormal": 0.0}

    def fd_jacobian(push, theta, h):
        cols = []
        for k in range(theta.size):
            e = np.zeros_like(theta); e[k] = h
            cols.append((push(theta + e) - push(theta - e)) / (2.0 * h))
        return np.stack(cols, axis=1)

    for _ in range(count):
        d = int(rng.integers(1, 4))
        Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
        Sigma = Q @ np.diag(rng.uniform(0.5, 2.0, size=d)) @ Q.T
        mu = rng.standard_normal(d)
        z = rng.standard_normal(d)
        theta = np.concatenate([mu, vech(Sigma)])

        for name, sample, jac in (
            ("gaussian", gaussian_sample, gaussian_jacobian),
            ("lognormal", lognormal_sample, lognormal_jacobian),
        ):
            def push(tv, _s=sample):
                return _s(GaussianParams.from_vector(tv, d), z)
            an = jac(GaussianParams.from_vector(theta, d), z)
            fd = fd_jacobian(push, theta, 1e-6)
            scale = max(np.max(np.abs(an)), np.max(np.abs(fd)), 1.0)
            worst[name] = max(worst[name], np.max(np.abs(an - fd)) / scale)

        c = rng.standard_normal(d)
        r = float(rng.uniform(0.5, 2.0))
        theta_s = np.concatenate([c, [r]])

        def push_sphere(tv):
            from ..models import SphereParams
            return sphere_sample(SphereParams.from_vector(tv, d), z)

        from ..models import SphereParams
        an = sphere_jacobian(SphereParams.from_vector(theta_s, d), z)
        fd = fd_jacobian(push_sphere, theta_s, 1e-6)
        scale = max(np.max(np.abs(an)), np.max(np.abs(fd)), 1.0)
        worst["sphere"] = max(worst["sphere"], np.max(np.abs(an - fd)) / scale)
    return worst
