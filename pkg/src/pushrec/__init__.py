"""Receding-horizon push recovery for a centroidal humanoid model."""

from pushrec.errors import (
    ConfigurationError,
    ConstraintSetError,
    DegenerateHullError,
    InvalidArgument,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ConstraintSetError",
    "DegenerateHullError",
    "InvalidArgument",
    "__version__",
]
