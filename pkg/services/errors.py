from typing import Optional


class CorrelationError(Exception):
    """Base class for every error raised by the services package."""


class NonConvergent(CorrelationError):
    pass


class DomainError(CorrelationError):
    pass


class NotHermitian(CorrelationError):
    pass


class NoSignChange(CorrelationError):
    pass


class ParamOutOfRange(CorrelationError):
    pass


class BadSetting(CorrelationError):
    pass


class StateParseError(CorrelationError):
    """Raised for unreadable state files and family strings."""


class NotDensityMatrix(CorrelationError):
    """A candidate matrix failed one of the density-matrix checks."""

    def __init__(self, check: str, magnitude: float, detail: Optional[str] = None):
        self.check = check
        self.magnitude = magnitude
        message = f"{check} check failed (magnitude {magnitude:.3e})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
