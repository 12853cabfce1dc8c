"""Exception types raised across the package.

Every error condition named in the public API gets its own class so callers
can catch precisely; all inherit from DunklAlgError.
"""


class DunklAlgError(Exception):
    """Base class for all package errors."""


# exact arithmetic
class ZeroDenominator(DunklAlgError):
    pass


class NotInvertible(DunklAlgError):
    pass


class ZeroElement(DunklAlgError):
    pass


class NotOrthogonal(DunklAlgError):
    pass


# root systems / groups
class UnsupportedField(DunklAlgError):
    """Realization would need irrational coordinates (I2(5), H3, H4, ...)."""


class BadDimension(DunklAlgError):
    pass


class CapExceeded(DunklAlgError):
    pass


# operator algebra
class DimensionMismatch(DunklAlgError):
    pass


class BadSpec(DunklAlgError):
    pass


# abstract algebra / rewriting
class ParseError(DunklAlgError):
    def __init__(self, message, position=None):
        super().__init__(message if position is None
                         else f"{message} (at position {position})")
        self.position = position


class IndexOutOfRange(DunklAlgError):
    pass


class StepBudgetExceeded(DunklAlgError):
    pass


class PoleAtSamplePoint(DunklAlgError):
    pass


class BadCentralValue(DunklAlgError):
    pass


# classical layer
class DegenerateInput(DunklAlgError):
    pass


class NotNull(DunklAlgError):
    pass


class GroupPartNotIdentity(DunklAlgError):
    pass


# superintegrability
class NotInvariant(DunklAlgError):
    pass


class DegeneratePoint(DunklAlgError):
    pass
