"""Exception and warning types raised across the package."""


class ShiftGainError(Exception):
    """Base class for all errors raised by shiftgain."""


class InvalidParams(ShiftGainError, ValueError):
    pass


class SingularMatrix(ShiftGainError):
    """A pivot collapsed during a solve; the matrix is numerically singular."""


class NumericalBreakdown(ShiftGainError):
    """An iterative factorization failed to converge or lost accuracy."""


class Overflow(ShiftGainError, OverflowError):
    pass


class NotHermitian(ShiftGainError):
    pass


class NotControllable(ShiftGainError):
    pass


class GridSelectionFailed(ShiftGainError):
    pass


class NotHurwitz(ShiftGainError):
    pass


class SingularSystem(ShiftGainError):
    pass


class EmptyTrace(ShiftGainError):
    pass


class MissingLyapunovData(ShiftGainError):
    pass


class IllConditionedC(RuntimeWarning):
    """Issued when the accumulator's condition number exceeds 1e12.

    The gain is still returned; its closed-loop certificates may be
    limited by floating-point precision rather than by the theory.
    """
