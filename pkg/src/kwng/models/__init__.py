"""Synthetic implicit-model zoo with analytic Jacobians and exact oracles."""

from .base import (
    GaussianParams,
    ModelSpec,
    SphereParams,
    unvech,
    vech,
    vech_basis_matrix,
    vech_dim,
)
from .gaussian import (
    bures_loss_and_grad,
    gaussian_exact_wng,
    gaussian_jacobian,
    gaussian_metric_apply,
    gaussian_sample,
    make_gaussian_model,
)
from .lognormal import (
    lognormal_exact_wng_1d,
    lognormal_jacobian,
    lognormal_metric_1d,
    lognormal_sample,
    make_lognormal_model,
)
from .sphere import (
    make_sphere_model,
    sphere_exact_wng,
    sphere_jacobian,
    sphere_sample,
)

_FACTORIES = {
    "gaussian": make_gaussian_model,
    "sphere": make_sphere_model,
    "lognormal": make_lognormal_model,
}

MODEL_NAMES = tuple(sorted(_FACTORIES))


def build_model(name, d):
    """Construct a ModelSpec by name ("gaussian", "sphere", "lognormal")."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {MODEL_NAMES}") from None
    return factory(d)


__all__ = [
    "GaussianParams",
    "ModelSpec",
    "SphereParams",
    "MODEL_NAMES",
    "build_model",
    "bures_loss_and_grad",
    "gaussian_exact_wng",
    "gaussian_jacobian",
    "gaussian_metric_apply",
    "gaussian_sample",
    "lognormal_exact_wng_1d",
    "lognormal_jacobian",
    "lognormal_metric_1d",
    "lognormal_sample",
    "make_gaussian_model",
    "make_lognormal_model",
    "make_sphere_model",
    "sphere_exact_wng",
    "sphere_jacobian",
    "sphere_sample",
    "unvech",
    "vech",
    "vech_basis_matrix",
    "vech_dim",
]
