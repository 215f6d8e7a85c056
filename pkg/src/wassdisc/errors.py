"""Exception types shared across the toolkit.

All derive from ValueError so callers can catch broadly; the specific
classes exist because the distinction matters operationally: a size-cap
error means "shrink the instance or raise the cap", never "accept an
approximate answer".
"""


class DimensionMismatchError(ValueError):
    """Operands live in different dimensions or an unsupported one."""


class DimTooLargeError(ValueError):
    """Requested dimension exceeds a generator's supported range."""


class OutOfDomainError(ValueError):
    """A point lies outside the domain an operation requires."""


class GridTooLargeError(ValueError):
    """Exact enumeration would exceed the configured grid/pair cap.

    Raised instead of silently truncating: a truncated supremum would
    under-report a discrepancy and corrupt every inequality certificate
    built on it.
    """


class SupportTooLargeError(ValueError):
    """Combined support size exceeds the exact transport solver cap."""


class RegimeViolationError(ValueError):
    """Parameters fall outside the validity window of a closed form."""


class DomainError(ValueError):
    """A scalar argument is outside the admissible range."""
