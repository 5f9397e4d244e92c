"""Exception types raised across the package."""


class InvalidFamilyError(ValueError):
    """A recurrence family violates its contract (e.g. nonpositive lambda)."""


class NotAChainSequenceError(ValueError):
    """Parameter iteration left (0, 1); carries the failing index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InvalidVerblunskyError(ValueError):
    pass


class IdentityViolationError(ArithmeticError):
    """An exact polynomial identity failed beyond tolerance."""


class DegenerateGridError(ArithmeticError):
    pass


class RootFindingError(ArithmeticError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InvariantViolationError(AssertionError):
    pass


class SizeCapError(ValueError):
    pass


class InfiniteEnergyError(ArithmeticError):
    """Two charges coincide, so the logarithmic energy is unbounded."""
