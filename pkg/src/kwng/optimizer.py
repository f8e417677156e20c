"""Descent loop with natural-gradient directions and damping adaptation.

Supports three direction choices: the kernel estimate, a model's exact
natural gradient, and the plain Euclidean gradient.  The damping scale
epsilon can be adapted by a multiplicative trust-region rule driven by
the ratio of achieved to first-order-predicted loss decrease.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .errors import DivergenceError, EmptyWindowError
from .estimator import EstimatorConfig, clip_by_norm, estimate
from .kernels import KernelSpec

METHODS = ("kwng", "exact_wng", "euclidean")

#: one window entry: (loss_before, loss_after, step_size, <direction, grad>)
StepRecord = Tuple[float, float, float, float]

_DENOM_FLOOR = 1e-30


@dataclass(frozen=True)
class LMState:
    """Multiplicative damping adaptation state."""

    epsilon: float
    omega: float = 0.85
    window: int = 5
    history: Tuple[StepRecord, ...] = ()

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.omega < 1.0:
            raise ValueError("omega must lie in (0, 1)")

    def push(self, record):
        return dataclasses.replace(self, history=self.history + (record,))


def reduction_ratio(history):
    """Largest ratio of achieved to predicted decrease over the window.

    Each entry contributes 2 (L_t - L_{t+1}) / (gamma_t <dir, grad>); the
    denominator is the first-order predicted decrease of the step and is
    floored at 1e-30 in magnitude, keeping its sign.
    """
    if len(history) == 0:
        raise EmptyWindowError("reduction ratio needs at least one recorded step")
    best = -np.inf
    for loss_before, loss_after, step, inner in history:
        denom = step * inner
        if abs(denom) < _DENOM_FLOOR:
            denom = _DENOM_FLOOR if denom >= 0 else -_DENOM_FLOOR
        best = max(best, 2.0 * (loss_before - loss_after) / denom)
    return best


def lm_update(state, r):
    """Shrink epsilon when the step over-performs, grow it when it stalls.

    r > 3/4 multiplies epsilon by omega, r < 1/4 divides by omega, the
    dead zone in between leaves it unchanged; the window is cleared.
    """
    eps = state.epsilon
    if r > 0.75:
        eps = state.epsilon * state.omega
    elif r < 0.25:
        eps = state.epsilon / state.omega
    return dataclasses.replace(state, epsilon=eps, history=())


@dataclass
class DescentTrace:
    """Per-iteration records of a descent run."""

    method: str
    iterations: List[int] = field(default_factory=list)
    thetas: List[np.ndarray] = field(default_factory=list)
    losses: List[float] = field(default_factory=list)
    grad_norms: List[float] = field(default_factory=list)
    direction_norms: List[float] = field(default_factory=list)
    epsilons: List[float] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    diverged: bool = False

    def append(self, t, theta, loss, gnorm, dnorm, eps, step):
        if self.iterations and t <= self.iterations[-1]:
            raise ValueError("iterations must be strictly increasing")
        self.iterations.append(t)
        self.thetas.append(np.array(theta, dtype=float, copy=True))
        self.losses.append(float(loss))
        self.grad_norms.append(float(gnorm))
        self.direction_norms.append(float(dnorm))
        self.epsilons.append(float(eps))
        self.step_sizes.append(float(step))

    @property
    def theta_array(self):
        return np.array(self.thetas)

    @property
    def final_loss(self):
        return self.losses[-1]


@dataclass(frozen=True)
class DescentConfig:
    """Everything a descent run needs besides the step-size schedule."""

    kernel: KernelSpec = KernelSpec()
    estimator: EstimatorConfig = EstimatorConfig()
    n_samples: int = 128
    n_basis: int = 100
    clip_norm: Optional[float] = None
    lm_enabled: bool = False
    lm_window: int = 5
    lm_omega: float = 0.85
    divergence_threshold: float = 1e12
    max_backtracks: int = 60


def _as_schedule(gamma) -> Callable[[int], float]:
    if callable(gamma):
        return gamma
    return lambda t: float(gamma)


def run_descent(model, loss, method, theta0, steps, gamma, config, rng):
    """Run gradient descent with the chosen direction.

    ``loss`` maps theta to (value, euclidean gradient).  Steps violating
    the model's feasibility predicate are halved until feasible.  Raises
    DivergenceError (carrying the partial trace) if the loss exceeds the
    configured threshold or turns non-finite.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    schedule = _as_schedule(gamma)
    theta = np.array(theta0, dtype=float, copy=True)
    trace = DescentTrace(method=method)
    lm = LMState(
        epsilon=config.estimator.epsilon,
        omega=config.lm_omega,
        window=config.lm_window,
    )
    pending = None  # (loss_before, step, inner) awaiting the next loss value

    for t in range(steps + 1):
        value, grad = loss(theta)
        if not np.isfinite(value) or value > config.divergence_threshold:
            trace.diverged = True
            raise DivergenceError(
                f"loss {value!r} at iteration {t}", trace=trace
            )

        if pending is not None:
            lm = lm.push((pending[0], float(value), pending[1], pending[2]))
            pending = None
            if config.lm_enabled and len(lm.history) >= config.lm_window:
                lm = lm_update(lm, reduction_ratio(lm.history))

        if t == steps:
            trace.append(t, theta, value, np.linalg.norm(grad), 0.0, lm.epsilon, 0.0)
            break

        direction = _direction(model, theta, grad, method, config, lm.epsilon, rng)
        if config.clip_norm is not None:
            direction = clip_by_norm(direction, config.clip_norm)

        step = schedule(t)
        new_theta = theta - step * direction
        shrink = 0
        while not model.feasible(new_theta):
            shrink += 1
            if shrink > config.max_backtracks:
                trace.diverged = True
                raise DivergenceError(
                    f"no feasible step at iteration {t}", trace=trace
                )
            step *= 0.5
            new_theta = theta - step * direction

        trace.append(
            t, theta, value, np.linalg.norm(grad), np.linalg.norm(direction),
            lm.epsilon, step,
        )
        pending = (float(value), step, float(direction @ grad))
        theta = new_theta

    return trace


def _direction(model, theta, grad, method, config, epsilon, rng):
    if method == "euclidean":
        return np.asarray(grad, dtype=float).copy()
    if method == "exact_wng":
        if model.exact_wng is None:
            raise ValueError(f"model {model.name!r} has no exact oracle")
        return model.exact_wng(theta, grad)
    est_cfg = dataclasses.replace(config.estimator, epsilon=epsilon)
    result = estimate(
        model, theta, config.kernel, est_cfg,
        config.n_samples, config.n_basis, rng, grad,
    )
    return result.values
