"""Training-loop callback that exports class-incremental run logs."""

from .errors import (
    EvaluationOutOfOrder,
    ExportError,
    IncompleteEvaluation,
    NonContiguousTask,
    OutOfRangeAccuracy,
    OverlappingClasses,
    ValidationFailed,
)
from .session import SCHEMA_VERSION, ExportSession, validate_document

__version__ = "0.1.0"

__all__ = [
    "SCHEMA_VERSION",
    "EvaluationOutOfOrder",
    "ExportError",
    "ExportSession",
    "IncompleteEvaluation",
    "NonContiguousTask",
    "OutOfRangeAccuracy",
    "OverlappingClasses",
    "ValidationFailed",
    "validate_document",
]
