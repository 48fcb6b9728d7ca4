"""Exception hierarchy shared by every fwlab module."""


class FWLabError(Exception):
    """Base class for all errors raised by fwlab."""


class InvalidArgumentError(FWLabError, ValueError):
    pass


class NumericFaultError(FWLabError, ArithmeticError):
    """NaN or Inf encountered in a field or during time stepping."""


class InsufficientResolutionError(FWLabError, ValueError):
    pass


class FrequencyOverflowError(FWLabError, ValueError):
    """Requested carrier frequency does not fit below the grid Nyquist limit."""


class OutOfWindowError(FWLabError, ValueError):
    pass


class DivergenceDetectedError(FWLabError, RuntimeError):
    pass


class HypothesisViolationError(FWLabError, ValueError):
    """Experiment parameters fall outside the regime where the result being illustrated applies."""


class BreakingDetectedError(FWLabError, RuntimeError):
    """Slope monitor fired during an experiment; ``trajectory`` holds the partial run."""

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
