"""Exception hierarchy for run-log validation, parsing and reporting.

Every data-facing error carries an optional ``path``: a dotted/bracketed
field path into the offending document (e.g. ``evaluations[1].per_class.cat``)
so that CLI diagnostics can pinpoint the exact field. Errors raised on
in-memory objects may leave ``path`` empty.
"""

from __future__ import annotations


class CilGaugeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationFailure(CilGaugeError):
    """A document or in-memory object violates a structural rule."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        return f"{self.path}: {base}" if self.path else base


class InvalidSchedule(ValidationFailure):
    """Task schedule breaks its invariants (indices, disjointness, emptiness)."""


class DuplicateObservation(ValidationFailure):
    """The same (evaluation, class) pair was observed more than once."""


class MissingObservation(ValidationFailure):
    """A seen class has no accuracy entry at some evaluation step."""


class UnseenClassObservation(ValidationFailure):
    """An accuracy was recorded for a class whose task had not started yet."""


class OutOfRangeAccuracy(ValidationFailure):
    """An accuracy value lies outside [0, 1]."""


class UnknownClass(ValidationFailure):
    """An observation names a class that no task in the schedule contains."""


class MalformedSyntax(ValidationFailure):
    """The input is not syntactically valid (JSON errors, ordering rules)."""


class UnknownSchemaVersion(ValidationFailure):
    """The document declares a schema_version this build does not recognize."""


class MissingField(ValidationFailure):
    """A required document field is absent."""


class TypeMismatch(ValidationFailure):
    """A document field has the wrong JSON type."""


class NonContiguousEvaluations(ValidationFailure):
    """Evaluation indices must run 1, 2, ... with no gaps."""


class OverlappingTaskClasses(ValidationFailure):
    """Two tasks claim the same class identifier."""


class ScheduleMismatchWithinGroup(ValidationFailure):
    """Runs grouped together (same method/dataset/buffer) disagree on schedule."""


class RunSetError(CilGaugeError):
    """Aggregate of per-file failures from loading a run set (not fail-fast)."""

    def __init__(self, failures: list[tuple[str, CilGaugeError]]):
        self.failures = failures
        lines = [f"{source}: {err}" for source, err in failures]
        super().__init__("\n".join(lines))


class EmptySeries(CilGaugeError):
    """A metric series required to be non-empty (and fully defined) is not."""


class InvalidProfile(CilGaugeError):
    """Synthetic forgetting profile parameters are out of range."""


class UnknownMetricName(CilGaugeError):
    """The requested metric is not one this package computes."""


class UnknownFigureName(CilGaugeError):
    """The requested plot-data figure kind does not exist."""
