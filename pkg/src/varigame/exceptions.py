"""Exception types raised by varigame."""


class VarigameError(Exception):
    """Base class for all package errors."""


class ConfigurationError(VarigameError, ValueError):
    """Invalid parameter, kernel name or configuration document."""


class GridMismatchError(VarigameError, ValueError):
    """Two sampled functions do not live on the same time grid."""


class DivergenceError(VarigameError, ArithmeticError):
    """Backward integration produced a non-finite state.

    Attributes:
      t: time at which the state first became non-finite.
    """

    def __init__(self, message, t):
        super().__init__(message)
        self.t = t


class NoRootsError(VarigameError):
    """The shooting scan found no admissible trajectory."""


class LPError(VarigameError):
    """Simplex iteration cap exceeded or malformed game matrix."""
