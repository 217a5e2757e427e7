class SegSylError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SegSylError, ValueError):
    """Raw data violates a type invariant."""


class SegmentCountMismatchError(SegSylError, ValueError):
    """A syllable pattern cannot be laid over a group with a different segment count."""


class NoCompletePathError(SegSylError):
    """No sequence of allowed syllable lengths covers the input segments."""


class SingularSystemError(SegSylError, ArithmeticError):
    """Elimination found no usable pivot.

    ``column`` is the zero-based column where elimination stopped.
    """

    def __init__(self, column: int, pivot: float, threshold: float):
        self.column = column
        self.pivot = pivot
        self.threshold = threshold
        super().__init__(
            f"singular system: pivot |{pivot:.3e}| below {threshold:.3e} in column {column}"
        )
