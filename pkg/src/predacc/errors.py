"""Exception hierarchy shared by every module in the package."""


class PredaccError(Exception):
    """Base class for all package errors."""


class DomainError(PredaccError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AlignmentError(PredaccError, ValueError):
    """Series that must be paired element-wise have different lengths."""


class InsufficientDataError(PredaccError, ValueError):
    """Too few observations for the requested window, block count or test."""


class RankDeficiencyError(PredaccError, ArithmeticError):
    """A least-squares window has a singular Gram matrix.

    Attributes
    ----------
    origin : int
        Time index of the forecast origin whose estimation window is singular.
    """

    def __init__(self, message: str, origin: int):
        super().__init__(message)
        self.origin = origin


class DegenerateStatisticError(PredaccError, ArithmeticError):
    """A test statistic has a zero denominator (e.g. identical forecasts)."""
