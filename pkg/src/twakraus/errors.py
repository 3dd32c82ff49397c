"""Exception and warning types raised across the package."""


class TwaError(Exception):
    """Base class for all errors raised by twakraus."""


class InvalidDimensionError(TwaError, ValueError):
    """Fock dimension too small for the requested operator or state."""


class NonHermitianError(TwaError, ValueError):
    """An operator expected to be Hermitian is not (or a symbol is not real)."""


class ShapeMismatchError(TwaError, ValueError):
    pass


class IndexRangeError(TwaError, ValueError):
    pass


class DivergenceError(TwaError, ArithmeticError):
    """A classical trajectory left the guarded region or became non-finite.

    ``nodes`` holds the starting points of the offending trajectories.
    """

    def __init__(self, message, nodes=()):
        super().__init__(message)
        self.nodes = list(nodes)


class ConvergenceError(TwaError, ArithmeticError):
    pass


class StepSizeError(TwaError, ArithmeticError):
    """Trace drift during operator integration exceeded its tolerance."""


class TruncationError(TwaError, ArithmeticError):
    """Population reached the last Fock level of the truncated basis."""


class EmptyFamilyError(TwaError, ValueError):
    pass


class ConfigError(TwaError, ValueError):
    pass


class TruncationWarning(UserWarning):
    pass


class BoundaryLeakWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass
