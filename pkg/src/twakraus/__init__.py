"""Truncated Wigner evolution as an indefinite Lindblad map.

Two routes to the same operator R(t): classical transport of the Wigner
function followed by inverse Weyl reconstruction, and direct integration of
the operator equation with signed Lindblad channels. The analysis module
tracks the negative eigenvalues that both routes produce.
"""

from ._backend import NAME as BACKEND
from .errors import (
    BoundaryLeakWarning,
    ConditioningWarning,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    EmptyFamilyError,
    IndexRangeError,
    InvalidDimensionError,
    NonHermitianError,
    ShapeMismatchError,
    StepSizeError,
    TruncationError,
    TruncationWarning,
    TwaError,
)
from .fock import HARMONIC, KERR, SHG, MonomialParams

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HARMONIC",
    "KERR",
    "SHG",
    "MonomialParams",
    "BoundaryLeakWarning",
    "ConditioningWarning",
    "ConfigError",
    "ConvergenceError",
    "DivergenceError",
    "EmptyFamilyError",
    "IndexRangeError",
    "InvalidDimensionError",
    "NonHermitianError",
    "ShapeMismatchError",
    "StepSizeError",
    "TruncationError",
    "TruncationWarning",
    "TwaError",
    "__version__",
]
