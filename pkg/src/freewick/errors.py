"""Exception types shared across the package."""


class FreewickError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(FreewickError):
    """A creation/raising step would exceed the allocated level or degree budget.

    Budgets are computed from polynomial degree up front; exceeding one is a
    caller bug, never something to truncate silently.
    """


class EnumerationBoundError(FreewickError, ValueError):
    """Requested enumeration size is outside the supported range."""


class DomainBoundError(FreewickError, ValueError):
    """Argument violates a convergence-radius bound, the series may diverge."""


class ConfigError(FreewickError, ValueError):
    """Invalid CLI/model configuration."""
