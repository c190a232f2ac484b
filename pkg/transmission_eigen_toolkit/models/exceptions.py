"""
Structured errors for the transmission eigenvalue toolkit.

Every error carries the process exit code the command-line front end uses
and can render itself as the JSON object written to stderr.
"""

from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Base class for all toolkit failures."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        stage: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        """
        Initialize the error.

        Args:
            message: Human readable description
            stage: Pipeline stage or command that failed
            details: Extra machine-readable context
        """
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.details = dict(details or {})

    def with_stage(self, stage: str) -> "ToolkitError":
        """Attach a stage name unless one is already set."""
        if self.stage is None:
            self.stage = stage
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Render the error as the stderr JSON payload."""
        return {
            'error': type(self).__name__,
            'stage': self.stage,
            'message': self.message,
            'exit_code': self.exit_code,
            'details': self.details
        }


class PotentialValidationError(ToolkitError):
    """Invalid potential, boundary condition or input file."""

    exit_code = 2


class UnsupportedInputError(ToolkitError):
    """Input that is valid but outside what an operation supports."""

    exit_code = 2


class AccuracyError(ToolkitError):
    """A numerical method could not reach its tolerance."""

    exit_code = 3


class RangeGuardError(AccuracyError):
    """|Im k|·b exceeds the overflow guard."""


class ContourError(AccuracyError):
    """A zero sits on a counting contour even after nudging."""


class AmbiguityError(AccuracyError):
    """Winding counts did not stabilise while shrinking the circle."""


class MarchenkoSolveError(AccuracyError):
    """The discretized Marchenko operator is singular or ill-conditioned."""


class DatumInconsistencyError(ToolkitError):
    """Input data contradict a structural property of the problem."""

    exit_code = 4


class PoleError(DatumInconsistencyError):
    """The Jost function vanishes where S(k) is requested."""
