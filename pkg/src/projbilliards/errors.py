"""Exception hierarchy shared by all modules."""


class BilliardError(Exception):
    """Base class."""


class GeometryError(BilliardError, ValueError):
    """Input violates an incidence or position precondition."""


class DegenerateInputError(GeometryError):
    """Coincident or otherwise degenerate input."""


class TransversalityError(GeometryError):
    """A line or frame that should be transverse is tangent."""


class SingularMemberError(GeometryError):
    """A pencil member has no dual (or no primal) form."""


class NumericalError(BilliardError, ArithmeticError):
    """Iteration failed to converge or lost too much accuracy."""


class StepBudgetError(BilliardError):
    """An iteration ran out of its step budget."""
