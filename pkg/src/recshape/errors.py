"""Exception types raised across the package."""


class RecshapeError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class RecurrenceOverflowError(RecshapeError, OverflowError):
    """A term of the sequence left the finite floating-point range."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"non-finite value at index {index}")


class RootFindingError(RecshapeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3g})")


class FitError(RecshapeError):
    """No recurrence of the allowed order reproduces the samples."""


class TrigRangeError(RecshapeError):
    """Torus dimension too large for the grid budget."""
