"""Worst-case evaluation harness for class-incremental learning runs.

Ingest per-class test-accuracy logs, compute the metric suite (acc, bwt,
mica, mica_old, wamica, class-accuracy distributions), and compare methods
by their worst-case behaviour instead of their average.
"""

from .errors import (
    CilGaugeError,
    DuplicateObservation,
    EmptySeries,
    InvalidProfile,
    InvalidSchedule,
    MalformedSyntax,
    MissingField,
    MissingObservation,
    NonContiguousEvaluations,
    OutOfRangeAccuracy,
    OverlappingTaskClasses,
    RunSetError,
    ScheduleMismatchWithinGroup,
    TypeMismatch,
    UnknownClass,
    UnknownFigureName,
    UnknownMetricName,
    UnknownSchemaVersion,
    UnseenClassObservation,
    ValidationFailure,
)
from .ingest import (
    RunGroup,
    RunLogDocument,
    document_from_run,
    load_run_log,
    load_run_set,
    parse_run_log,
    serialize_document,
    validate_and_build,
)
from .metrics import (
    DistributionSummary,
    MicaSeries,
    TaskAccuracyMatrix,
    WamicaSummary,
    acc_series,
    bwt_gem_series,
    bwt_series,
    class_distribution,
    mica_old_series,
    mica_series,
    task_matrix,
    wamica,
)
from .model import (
    AccuracyTensor,
    MetricSeries,
    RunLog,
    TaskSchedule,
    TaskSpec,
    build_run_log,
)
from .report import (
    ComparisonReport,
    GroupMetrics,
    RunMetrics,
    build_report,
    compute_group_metrics,
    compute_run_metrics,
    emit_plot_data,
    render_comparison_table,
    render_percent,
)
from .synth import (
    ForgettingProfile,
    generate_method_family,
    generate_run,
    write_run,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyTensor",
    "CilGaugeError",
    "ComparisonReport",
    "DistributionSummary",
    "DuplicateObservation",
    "EmptySeries",
    "ForgettingProfile",
    "GroupMetrics",
    "InvalidProfile",
    "InvalidSchedule",
    "MalformedSyntax",
    "MetricSeries",
    "MicaSeries",
    "MissingField",
    "MissingObservation",
    "NonContiguousEvaluations",
    "OutOfRangeAccuracy",
    "OverlappingTaskClasses",
    "RunGroup",
    "RunLog",
    "RunLogDocument",
    "RunMetrics",
    "RunSetError",
    "ScheduleMismatchWithinGroup",
    "TaskAccuracyMatrix",
    "TaskSchedule",
    "TaskSpec",
    "TypeMismatch",
    "UnknownClass",
    "UnknownFigureName",
    "UnknownMetricName",
    "UnknownSchemaVersion",
    "UnseenClassObservation",
    "ValidationFailure",
    "WamicaSummary",
    "acc_series",
    "build_report",
    "build_run_log",
    "bwt_gem_series",
    "bwt_series",
    "class_distribution",
    "compute_group_metrics",
    "compute_run_metrics",
    "document_from_run",
    "emit_plot_data",
    "generate_method_family",
    "generate_run",
    "load_run_log",
    "load_run_set",
    "mica_old_series",
    "mica_series",
    "parse_run_log",
    "render_comparison_table",
    "render_percent",
    "serialize_document",
    "task_matrix",
    "validate_and_build",
    "wamica",
    "write_run",
]
