"""Exception hierarchy.

Precondition violations derive from ``ValueError`` so callers that only care
about "bad input" can catch that; numerical and run-time failures derive from
``RuntimeError``.
"""


class FracDriftError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FracDriftError, ValueError):
    """An argument violated a documented precondition."""


class InvalidModel(ValidationError):
    pass


class NonIncreasingGrid(ValidationError):
    """Times are not strictly increasing (starting after the implicit 0)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ZeroSize(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class EmptySeries(ValidationError):
    pass


class WrongScheme(ValidationError):
    pass


class InvalidIndices(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DegenerateVariance(ValidationError):
    pass


class DegenerateGrid(FracDriftError, RuntimeError):
    """A random grid came out with a tie even after one redraw."""


class FactorizationFailure(FracDriftError, RuntimeError):
    """Covariance matrix not numerically positive definite, even with jitter."""


class DegenerateDenominator(FracDriftError, ArithmeticError):
    pass


class ReplicateFailure(FracDriftError, RuntimeError):
    """A Monte Carlo replicate raised; ``index`` identifies its child stream."""

    def __init__(self, index, cause):
        super().__init__(f"replicate {index} failed: {cause}")
        self.index = index
        self.cause = cause
