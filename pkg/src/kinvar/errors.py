"""Exception types raised by kinvar."""


class KinvarError(Exception):
    """Base class for all kinvar errors."""


class ConfigurationError(KinvarError, ValueError):
    """Bad flux kind, malformed config key or value."""


class DomainError(KinvarError, ValueError):
    """Input outside the admissible domain (states outside [0, 1], bad weights, ...)."""


class DegenerateInputError(DomainError):
    """Input for which the requested quantity is undefined (e.g. equal shock states)."""


class InvalidStateError(KinvarError, ValueError):
    """A kinetic column that should be non-decreasing is not."""


class ResolutionError(KinvarError, ValueError):
    """Grid too coarse for the requested operation."""


class ShapeError(KinvarError, ValueError):
    """Mismatched grids, shapes or output times."""


class StabilityError(KinvarError, RuntimeError):
    """Time step violates the CFL restriction."""
