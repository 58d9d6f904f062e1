class NumericsError(Exception):
    """Base class for every failure raised by the numerical library."""


class DomainError(NumericsError, ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(NumericsError, ArithmeticError):
    """A result or query would leave the representable or tabulated range."""


class InstabilityError(NumericsError):
    """Shooting integration left the Hastings-McLeod branch."""


class DiscretizationError(NumericsError):
    """A quadrature discretisation is too coarse to be positive definite."""


class PrecisionExhaustedError(NumericsError):
    """Double-double arithmetic ran out of digits (non-positive pivot)."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot
