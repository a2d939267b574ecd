"""Exception hierarchy.

Two families: :class:`ValidationError` for inputs that violate an
operation's preconditions, and :class:`NumericalFailure` for computations
that break down on otherwise valid input.  The CLI maps them to exit
codes 2 and 3.
"""


class HomdynError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HomdynError, ValueError):
    """Input violates a documented precondition."""


class InvalidInput(ValidationError):
    pass


class NotHyperbolic(ValidationError):
    pass


class NotAnSl2Module(ValidationError):
    pass


class NotInvariant(ValidationError):
    pass


class CapExceeded(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


class DivergentRegion(ValidationError):
    pass


class NoDivergence(ValidationError):
    """The displacement never reaches the requested threshold."""


class NumericalFailure(HomdynError, ArithmeticError):
    """A computation could not be completed to the required accuracy."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NotRealDiagonalizable(NumericalFailure):
    pass


class NumericUnderflow(NumericalFailure):
    pass


class MagnitudeOverflow(NumericalFailure):
    pass


class BoundaryDegenerate(NumericalFailure):
    pass


class NonConvergence(NumericalFailure):
    pass


class FactorizationUndefined(NumericalFailure):
    pass
