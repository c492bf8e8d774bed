"""Errors raised while recording an incremental training run."""

from __future__ import annotations


class ExportError(Exception):
    """Base class for all exporter errors."""


class NonContiguousTask(ExportError):
    """Tasks must be begun in order 1, 2, 3, ... with no gaps."""


class OverlappingClasses(ExportError):
    """A class id was already introduced by an earlier task."""


class EvaluationOutOfOrder(ExportError):
    """An evaluation must follow the task just begun, exactly once."""


class IncompleteEvaluation(ExportError):
    """An evaluation omitted a seen class or named an unknown one."""


class OutOfRangeAccuracy(ExportError):
    """Accuracies must be fractions in [0, 1]."""


class ValidationFailed(ExportError):
    """The session cannot produce a valid run-log file."""
