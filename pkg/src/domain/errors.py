"""Exception hierarchy shared by every layer."""

from typing import Optional


class WeakValueError(Exception):
    """Base class for all toolkit errors."""


class OrthogonalSelection(WeakValueError):
    """Pre- and post-selected states are orthogonal: the AAV weak value is undefined."""

    def __init__(self, overlap: float):
        self.overlap = overlap
        super().__init__(
            f"|<chi_f|chi_in>| = {overlap:.3e} is below the orthogonality "
            f"threshold; the standard weak value is undefined")


class EmptyGrid(WeakValueError):
    pass


class NonUniformGrid(WeakValueError):
    pass


class WrongStageCount(WeakValueError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected {expected} applied stage(s), got {actual}")


class EmptyState(WeakValueError):
    pass


class EmptyDistribution(WeakValueError):
    pass


class GridMismatch(WeakValueError):
    pass


class EnvelopeViolation(WeakValueError):
    """The rejection-sampling envelope fell below the target density."""


class InvalidRange(WeakValueError):
    pass


class ConfigError(WeakValueError):
    """Configuration could not be parsed; carries the offending field and line."""

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
