"""Exception hierarchy shared by every module."""


class OpMeansError(Exception):
    """Base class for library errors."""


class DimensionMismatchError(OpMeansError, ValueError):
    pass


class NotPositiveDefiniteError(OpMeansError, ValueError):
    pass


class DomainError(OpMeansError, ValueError):
    """A scalar function was asked for a value outside its domain."""


class ConditioningError(OpMeansError, ValueError):
    pass


class ConvergenceError(OpMeansError, RuntimeError):
    """An iterative procedure did not settle within its budget."""


class PreconditionError(OpMeansError, ValueError):
    """Inputs lie outside the region where a construction is defined."""
