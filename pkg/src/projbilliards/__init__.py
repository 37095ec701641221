"""Projective and complex billiards: reflection laws, caustics of conics,
k-reflective polygons and numeric checks of periodic-orbit theorems."""

from .errors import (BilliardError, DegenerateInputError, GeometryError, NumericalError,
                     SingularMemberError, StepBudgetError, TransversalityError)

__version__ = "0.1.0"
