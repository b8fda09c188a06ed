"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class SingularInput(ArithmeticError):
    """The requested value is infinite (pointwise kernel singularity).

    Raised instead of returning a sentinel so that a singular evaluation can
    never silently enter a quadrature sum.
    """


class PropagatedSingularity(ArithmeticError):
    """An integrand returned a non-finite value away from the allowed
    singular set."""
