"""Metric suite for class-incremental runs.

Everything here is a pure function of an immutable :class:`AccuracyTensor`
(or of another metric's output), so callers may evaluate different runs or
metrics concurrently without coordination.

Computed quantities, all on [0, 1] fractions:

* task accuracy matrix -- mean per-class accuracy of each task after each
  training step (lower triangular).
* acc -- mean of the task accuracies over all seen tasks; tasks of unequal
  size count equally (mean over tasks, not over classes).
* bwt -- backward transfer: average gap between the current task's accuracy
  and each earlier task's accuracy at the same step. A second form, bwt_gem,
  compares each earlier task's current accuracy against that task's accuracy
  right after it was learned, which is the form most of the transfer
  literature uses; both are exposed, ``bwt`` being the default.
* mica -- minimum incremental class accuracy: the worst per-class accuracy
  over all seen classes, a lower bound on what any class achieves.
* mica_old -- the same minimum restricted to classes of earlier tasks,
  isolating forgetting from current-task performance.
* wamica -- weighted average of the mica series: the mean of the series
  scaled by ``w = 1 - (max - min)``, penalizing dispersion across steps.
* class_distribution -- five-number summary plus mean of the per-class
  accuracies at one step, for boxplot-style views.

All reductions use :func:`math.fsum` (exact compensated summation) so table
output is deterministic across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptySeries
from .model import AccuracyTensor, ClassId, MetricSeries


@dataclass(frozen=True)
class TaskAccuracyMatrix:
    """Lower-triangular per-task mean accuracies.

    ``rows[i - 1][j - 1]`` is the mean accuracy of task j's classes measured
    after training task i, defined for j <= i only.
    """

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for i, row in enumerate(self.rows, start=1):
            if len(row) != i:
                raise ValueError(f"row {i} must have {i} entries, got {len(row)}")

    @property
    def evaluated_through(self) -> int:
        return len(self.rows)

    def value(self, evaluation_index: int, task_index: int) -> float:
        """R[i][j] with 1-based indices; j must not exceed i."""
        if task_index > evaluation_index:
            raise ValueError(
                f"task accuracy undefined above the diagonal "
                f"(i={evaluation_index}, j={task_index})"
            )
        return self.rows[evaluation_index - 1][task_index - 1]


@dataclass(frozen=True)
class MicaSeries(MetricSeries):
    """Minimum class accuracy per step, with the classes attaining it.

    ``argmin_classes[i - 1]`` lists every class id whose accuracy equals the
    step's minimum, sorted, so ties are visible to reports.
    """

    argmin_classes: tuple[tuple[ClassId, ...], ...]


@dataclass(frozen=True)
class WamicaSummary:
    """Dispersion-weighted mean of a mica series, with its ingredients."""

    mica_series: MetricSeries
    mica_min: float
    mica_max: float
    weight_w: float
    wamica: float

    def __post_init__(self):
        if self.mica_min > self.mica_max:
            raise ValueError("mica_min exceeds mica_max")
        if not 0.0 <= self.weight_w <= 1.0:
            raise ValueError(f"weight {self.weight_w!r} outside [0, 1]")
        if not 0.0 <= self.wamica <= 1.0:
            raise ValueError(f"wamica {self.wamica!r} outside [0, 1]")


@dataclass(frozen=True)
class DistributionSummary:
    """Five-number summary plus mean of per-class accuracies at one step."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    mean: float
    count: int


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values)


def task_matrix(tensor: AccuracyTensor) -> TaskAccuracyMatrix:
    """Mean per-class accuracy of every seen task after every evaluation."""
    schedule = tensor.schedule
    rows = []
    for i in tensor.evaluation_indices:
        row = []
        for j in range(1, i + 1):
            row.append(_mean([tensor.value(i, cid) for cid in schedule.classes_of(j)]))
        rows.append(tuple(row))
    return TaskAccuracyMatrix(tuple(rows))


def acc_series(matrix: TaskAccuracyMatrix) -> MetricSeries:
    """Mean task accuracy after each step: the unweighted mean of row i."""
    values = tuple(_mean(list(row)) for row in matrix.rows)
    return MetricSeries("acc", values)


def bwt_series(matrix: TaskAccuracyMatrix) -> MetricSeries:
    """Backward transfer after each step, current-task-referenced form.

    At step i >= 2: the mean of (R[i][i] - R[i][j]) over earlier tasks j.
    Positive values mean the newest task sits above the older ones.
    Undefined at step 1.
    """
    values: list[float | None] = [None]
    for i in range(2, matrix.evaluated_through + 1):
        current = matrix.value(i, i)
        gaps = [current - matrix.value(i, j) for j in range(1, i)]
        values.append(_mean(gaps))
    return MetricSeries("bwt", tuple(values[: matrix.evaluated_through]))


def bwt_gem_series(matrix: TaskAccuracyMatrix) -> MetricSeries:
    """Backward transfer, learned-accuracy-referenced form.

    At step i >= 2: the mean of (R[i][j] - R[j][j]) over earlier tasks j,
    i.e. how far each old task drifted from its just-learned accuracy.
    Negative values indicate forgetting. Undefined at step 1.
    """
    values: list[float | None] = [None]
    for i in range(2, matrix.evaluated_through + 1):
        drifts = [matrix.value(i, j) - matrix.value(j, j) for j in range(1, i)]
        values.append(_mean(drifts))
    return MetricSeries("bwt_gem", tuple(values[: matrix.evaluated_through]))


def mica_series(tensor: AccuracyTensor) -> MicaSeries:
    """Worst per-class accuracy over all seen classes, after each step.

    Ties are reported in full: every class attaining the step minimum is
    listed, sorted by class id.
    """
    values = []
    argmins = []
    for i in tensor.evaluation_indices:
        step = list(tensor.at(i))
        minimum = min(value for _, value in step)
        values.append(minimum)
        argmins.append(tuple(sorted(cid for cid, value in step if value == minimum)))
    return MicaSeries("mica", tuple(values), tuple(argmins))


def mica_old_series(tensor: AccuracyTensor) -> MetricSeries:
    """Worst per-class accuracy restricted to classes of earlier tasks.

    Excludes the classes introduced at the current step, so the value
    reflects retention only. Undefined at step 1 (no old classes yet).
    """
    schedule = tensor.schedule
    values: list[float | None] = []
    for i in tensor.evaluation_indices:
        if i == 1:
            values.append(None)
            continue
        old = schedule.classes_through(i - 1)
        values.append(min(value for cid, value in tensor.at(i) if cid in old))
    return MetricSeries("mica_old", tuple(values))


def wamica(mica: MetricSeries) -> WamicaSummary:
    """Dispersion-weighted mean of a mica series.

    ``w = 1 - (max - min)`` over the series; the result is w times the
    series mean. A flat series keeps its mean (w = 1); a series swinging
    across the whole [0, 1] range is annihilated (w = 0). For partial runs
    the mean is taken over the steps actually evaluated.
    """
    if len(mica) == 0:
        raise EmptySeries("wamica requires a non-empty mica series")
    if any(v is None for v in mica):
        raise EmptySeries("wamica requires every step of the mica series defined")
    values = list(mica.defined_values())
    lo, hi = min(values), max(values)
    weight = 1.0 - (hi - lo)
    return WamicaSummary(
        mica_series=mica,
        mica_min=lo,
        mica_max=hi,
        weight_w=weight,
        wamica=weight * _mean(values),
    )


def _quantile(sorted_values: list[float], p: float) -> float:
    """Linear interpolation between order statistics at position (n-1)p."""
    position = (len(sorted_values) - 1) * p
    lower = math.floor(position)
    fraction = position - lower
    if fraction == 0.0:
        return sorted_values[lower]
    return sorted_values[lower] + fraction * (sorted_values[lower + 1] - sorted_values[lower])


def class_distribution(tensor: AccuracyTensor, evaluation_index: int) -> DistributionSummary:
    """Five-number summary plus mean of all per-class accuracies at one step."""
    if evaluation_index not in tensor.evaluation_indices:
        raise ValueError(
            f"evaluation {evaluation_index} not present "
            f"(have {tensor.evaluation_indices})"
        )
    values = sorted(value for _, value in tensor.at(evaluation_index))
    return DistributionSummary(
        minimum=values[0],
        q1=_quantile(values, 0.25),
        median=_quantile(values, 0.50),
        q3=_quantile(values, 0.75),
        maximum=values[-1],
        mean=_mean(values),
        count=len(values),
    )
