"""Exception types shared across the package."""


class SecrelayError(Exception):
    """Base class for all package errors."""


class DomainError(SecrelayError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class InternalConsistencyError(SecrelayError, ArithmeticError):
    """A computed probability left [0, 1] by more than round-off allows."""


class QuadratureError(SecrelayError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Attributes
    ----------
    error_estimate : float
        Absolute error estimate achieved before giving up.
    """

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class UsageError(SecrelayError, ValueError):
    """Invalid user-supplied configuration; ``field`` names the offending setting."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
