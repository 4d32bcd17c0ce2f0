class InvalidArgument(ValueError):
    """Raised when an operation receives an argument outside its domain."""


class DegenerateHullError(InvalidArgument):
    """Fewer than three points, or all points collinear."""


class ConstraintSetError(ValueError):
    """A wrench constraint set failed its nonemptiness check."""


class ConfigurationError(ValueError):
    """Invalid scenario or runtime configuration."""
