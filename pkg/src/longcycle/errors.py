"""Exception types shared across the package."""


class LongCycleError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(LongCycleError, ValueError):
    """An argument is outside its documented domain."""


class SizeCapError(LongCycleError):
    """An exact solver was handed an instance above its configured cap."""


class InvalidColoringError(LongCycleError):
    """A vertex coloring violates a precondition (e.g. a red-black edge)."""


class UnsupportedRegimeError(LongCycleError):
    """The graph is outside the regime the operation is defined for
    (e.g. the strong 4-core is empty, so the cycle bound does not apply)."""


class UnsupportedParameterError(LongCycleError, ValueError):
    """A numeric parameter is outside the region where a formula converges."""


class InternalInvariantError(LongCycleError):
    """An internal consistency check failed; indicates a bug, not bad input."""
