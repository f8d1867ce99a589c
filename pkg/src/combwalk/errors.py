"""Exception types raised by the comb-walk engines."""


class CombWalkError(Exception):
    """Base class for all engine errors."""


class DomainError(CombWalkError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class RangeError(DomainError):
    """Argument outside the supported evaluation range of a special function."""


class OnCutError(DomainError):
    """A point lies on the branch cut [-3, 1] of the square root."""


class ToleranceNotReached(CombWalkError, ArithmeticError):
    """The polynomial propagator hit its degree cap before reaching tolerance."""


class QuadratureDivergence(CombWalkError, ArithmeticError):
    """Cancellation in a contour quadrature would exceed the requested tolerance."""


class QuadratureFailure(CombWalkError, ArithmeticError):
    """A real-line quadrature did not converge."""


class RootFindingFailure(CombWalkError, ArithmeticError):
    """Polished polynomial roots still have residuals above tolerance."""


class StallError(CombWalkError, ArithmeticError):
    """Descent-path integration step size underflowed."""


class ClassificationAmbiguous(CombWalkError):
    """Saddle relevance could not be decided (e.g. on or near a Stokes line)."""
