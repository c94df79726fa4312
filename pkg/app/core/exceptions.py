"""
Exception hierarchy for the repair toolkit.

Every error raised on purpose by the toolkit derives from RepairToolkitError so the
CLI can turn it into a machine-readable error record.
"""

from typing import Any


class RepairToolkitError(Exception):
    """Base exception carrying a message, optional context and the wrapped error."""

    def __init__(
        self,
        message: str,
        context: dict[str, Any] | None = None,
        original_error: Exception | None = None,
    ) -> None:
        self.message = message
        self.context = context or {}
        self.original_error = original_error
        super().__init__(self.message)

    def to_record(self) -> dict[str, Any]:
        """Serialize the error for the CLI error artifact."""
        return {"error": type(self).__name__, "message": self.message, "context": self.context}


class FormulaError(RepairToolkitError, ValueError):
    """Raised when an STL formula node is constructed with invalid arguments."""


class FormulaSyntaxError(FormulaError):
    """Raised when formula text does not match the grammar."""

    def __init__(self, message: str, position: int, original_error: Exception | None = None) -> None:
        self.position = position
        super().__init__(f"{message} (at position {position})", {"position": position}, original_error)


class UnknownPredicateError(FormulaError):
    """Raised when a formula references a signal name that nothing defines."""


class HorizonTooShortError(RepairToolkitError, ValueError):
    """Raised when a formula's time window does not fit in the trajectory."""


class DimensionMismatchError(RepairToolkitError, ValueError):
    """Raised when vector or matrix shapes disagree."""


class ControllerError(RepairToolkitError, ValueError):
    """Raised for malformed controller parameters or weight files."""


class PartitionError(RepairToolkitError, ValueError):
    """Raised when an initial-state box cannot be partitioned."""


class SynthesisError(RepairToolkitError):
    """Raised when seed-controller synthesis cannot produce a mixed controller."""


class VerifierInconsistencyError(RepairToolkitError):
    """Raised when a verified region contains a failing sample (verifier unsoundness)."""


class UnsupportedFormulaError(RepairToolkitError):
    """Raised when the verifier is asked to check a formula outside its templates."""


class DivergenceError(RepairToolkitError):
    """Raised when propagated interval bounds exceed the magnitude cap."""


class EnergyError(RepairToolkitError, ValueError):
    """Raised when the energy function is evaluated on invalid inputs."""


class ConfigError(RepairToolkitError, ValueError):
    """Raised when an experiment configuration fails validation."""


class ReportSchemaError(RepairToolkitError):
    """Raised when a report or snapshot document does not match its schema."""
