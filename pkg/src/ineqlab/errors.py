"""Exception types shared across the package."""


class IneqLabError(Exception):
    """Base class for all errors raised by ineqlab."""


class DomainError(IneqLabError, ValueError):
    """Parameter or argument outside the admissible range."""


class SingularityError(IneqLabError, ArithmeticError):
    """Quadrature detected a non-integrable blow-up at an endpoint."""


class InconsistencyError(IneqLabError, RuntimeError):
    """Input data contradicts itself (e.g. zero gradient for a nonzero function)."""


class NumericalError(IneqLabError, RuntimeError):
    """A numerical procedure produced NaN/Inf or otherwise broke down."""
