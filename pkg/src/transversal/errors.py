"""Exception types shared across the toolkit.

Each exception carries a short machine-readable ``code`` so the command line
front end can map failures to exit statuses.
"""


class TransversalError(Exception):
    """Base class for all toolkit errors."""

    code = "error"
    exit_status = 1


class PreconditionFailed(TransversalError, ValueError):
    """An input violates a documented precondition."""

    code = "precondition-failed"
    exit_status = 2


class DimensionMismatch(PreconditionFailed):
    """Vectors or sets of incompatible ambient dimension were combined."""

    code = "dimension-mismatch"


class UnsupportedClass(PreconditionFailed):
    """The requested operation is not implemented for this set class."""

    code = "unsupported-class"


class NotFoundAtBudget(TransversalError):
    """A search ended without a witness; this is never a refutation."""

    code = "not-found-at-budget"
    exit_status = 3


class NumericalFailure(TransversalError, ArithmeticError):
    """An iterative routine exhausted its budget or lost accuracy."""

    code = "numerical-failure"
    exit_status = 4


class NearestPointFailure(NumericalFailure):
    """Cone projections could not certify a required strict slack."""

    code = "nearest-point-failure"
