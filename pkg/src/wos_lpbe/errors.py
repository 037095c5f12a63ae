"""Exception types raised by the solver."""


class WosError(Exception):
    """Base class for solver errors."""


class InvalidPointError(WosError, ValueError):
    """A point lies on or outside the domain where an interior point is required."""


class OffBoundaryError(WosError, ValueError):
    """Boundary data was requested at a point that is not on the boundary."""


class ConfigurationError(WosError, ValueError):
    """A solver configuration cannot produce a terminating, well-defined walk."""
