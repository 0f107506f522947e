"""Exception types shared across the package."""

from __future__ import annotations


class DiracEdgeError(Exception):
    """Base class for every error raised by this package."""


class NumericalContractError(DiracEdgeError):
    """A numerical precondition or postcondition was violated."""


class InvalidWall(NumericalContractError):
    pass


class DegenerateGradient(NumericalContractError):
    pass


class ProjectionFailed(NumericalContractError):
    pass


class ConsistencyError(NumericalContractError):
    """Two independent evaluation routes of the same quantity disagree."""


class GridResolutionError(NumericalContractError):
    pass


class WindowError(NumericalContractError):
    pass


class BoundaryContamination(NumericalContractError):
    pass


class ConfigError(DiracEdgeError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DriftWarning(UserWarning):
    """The trajectory left the tolerance band around the interface and was re-projected."""


class PhaseResolutionWarning(UserWarning):
    """The potential phase per time step is large enough to under-resolve oscillations."""
