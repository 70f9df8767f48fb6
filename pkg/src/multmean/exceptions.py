class MultMeanError(Exception):
    """Base class for errors raised by this package."""


class DomainError(MultMeanError, ValueError):
    pass


class ResourceError(MultMeanError, MemoryError):
    pass


class SpecError(MultMeanError, ValueError):
    """Malformed or inconsistent multiplicative-function description."""


class BoundViolation(SpecError):
    pass


class AccelerationInapplicable(MultMeanError):
    """The series route cannot be used; fall back to the truncated product."""


class NumericFailure(MultMeanError, ArithmeticError):
    """A numeric safeguard tripped (e.g. a divergent-looking tail)."""
