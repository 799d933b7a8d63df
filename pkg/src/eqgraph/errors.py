"""Exception hierarchy.

Errors fall in three families, mirrored by the CLI exit codes: bad input
(exit 2), a computation that cannot proceed on valid-looking input (exit 3),
and a search that would blow through its configured budget (exit 4).
"""


class EqGraphError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(EqGraphError, ValueError):
    pass


class NotPrime(InvalidInput):
    pass


class EvenModulus(InvalidInput):
    pass


class FieldElementError(InvalidInput):
    """A value outside the canonical range 0..p-1."""


class ComputationError(EqGraphError):
    pass


class LambdaIsSquare(ComputationError):
    pass


class DegenerateQuadratic(ComputationError):
    pass


class NotHamiltonian(ComputationError):
    pass


class UnsupportedForm(ComputationError):
    pass


class PreconditionNotMet(ComputationError):
    pass


class CubicFamilyInvalid(ComputationError):
    pass


class BudgetError(EqGraphError):
    """A search was refused because it exceeds a configured cap."""


class ComponentTooLarge(BudgetError):
    pass


class SearchBudgetExceeded(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


class FieldTooLarge(BudgetError):
    """The per-prime lookup tables would not fit the memory budget."""
