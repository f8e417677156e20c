"""Exception and warning types shared across the package."""


class KwngError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteError(KwngError):
    """An input or result contains NaN or Inf."""


class NoConvergenceError(KwngError):
    """An iterative factorization failed to converge."""


class SingularSigmaError(KwngError):
    """A covariance matrix is not positive definite within the floor."""


class DegenerateCloudError(KwngError):
    """Too few points to define a projection plane."""


class EmptySetError(KwngError):
    """A point set that must be non-empty is empty."""


class ZeroSpreadError(KwngError):
    """All pairwise distances are zero, so no bandwidth can be resolved."""


class EmptyBatchError(KwngError):
    """A sample batch that must be non-empty is empty."""


class EmptyWindowError(KwngError):
    """A reduction-ratio window with no recorded steps."""


class DegenerateLatentError(KwngError):
    """A latent draw hit a zero-measure degenerate point."""


class DimensionUnsupportedError(KwngError):
    """The operation is only implemented for specific dimensions."""


class OracleUnavailableError(KwngError):
    """The requested model has no exact natural-gradient oracle."""


class DivergenceError(KwngError):
    """A descent run diverged. Carries the trace collected so far."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class AllZeroColumnsWarning(UserWarning):
    """Every damping column norm was zero; fell back to identity damping."""
