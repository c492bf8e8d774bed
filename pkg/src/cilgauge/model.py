"""Domain model for class-incremental runs.

A run is described by a :class:`TaskSchedule` (which classes arrive at which
task), an :class:`AccuracyTensor` (per-class test accuracy after each task),
and provenance metadata, bundled as a :class:`RunLog`. All types are immutable
after construction and safe to share across threads; every invariant is
checked at construction time so downstream metric code never re-validates.

Accuracies are stored as fractions in [0, 1]. Rendering as percentages is a
report-layer concern. Class identifiers are opaque strings; integer ids are
accepted anywhere and normalized to their decimal string form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import (
    DuplicateObservation,
    InvalidSchedule,
    MissingObservation,
    OutOfRangeAccuracy,
    OverlappingTaskClasses,
    UnknownClass,
    UnseenClassObservation,
)

ClassId = str


def normalize_class_id(raw: object) -> ClassId:
    """Coerce a raw class identifier (str or int) to its canonical string form."""
    if isinstance(raw, bool):
        raise TypeError(f"class id must be str or int, got bool {raw!r}")
    if isinstance(raw, int):
        return str(raw)
    if isinstance(raw, str):
        return raw
    raise TypeError(f"class id must be str or int, got {type(raw).__name__}")


@dataclass(frozen=True)
class TaskSpec:
    """One task of the incremental stream: a 1-based index and its class set."""

    task_index: int
    class_ids: frozenset[ClassId]

    def __init__(self, task_index: int, class_ids: Iterable[object]):
        object.__setattr__(self, "task_index", task_index)
        object.__setattr__(
            self, "class_ids", frozenset(normalize_class_id(c) for c in class_ids)
        )
        if not isinstance(self.task_index, int) or isinstance(self.task_index, bool):
            raise InvalidSchedule(f"task_index must be an integer, got {task_index!r}")
        if self.task_index < 1:
            raise InvalidSchedule(f"task_index must be >= 1, got {self.task_index}")
        if not self.class_ids:
            raise InvalidSchedule(f"task {self.task_index} has no classes")


@dataclass(frozen=True)
class TaskSchedule:
    """The ordered tasks of a run; class sets are pairwise disjoint.

    Task indices must be exactly 1..T in order. Lookup helpers are O(1) via a
    class-to-task map built once at construction.
    """

    tasks: tuple[TaskSpec, ...]
    _task_by_class: Mapping[ClassId, int] = field(repr=False, compare=False, hash=False)

    def __init__(self, tasks: Iterable[TaskSpec]):
        object.__setattr__(self, "tasks", tuple(tasks))
        if not self.tasks:
            raise InvalidSchedule("schedule has no tasks")
        by_class: dict[ClassId, int] = {}
        for position, task in enumerate(self.tasks, start=1):
            if task.task_index != position:
                raise InvalidSchedule(
                    f"task indices must be contiguous 1..T in order; "
                    f"position {position} holds task_index {task.task_index}"
                )
            for cid in task.class_ids:
                if cid in by_class:
                    raise OverlappingTaskClasses(
                        f"class {cid!r} appears in both task {by_class[cid]} "
                        f"and task {task.task_index}"
                    )
                by_class[cid] = task.task_index
        object.__setattr__(self, "_task_by_class", MappingProxyType(by_class))

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    def task_of(self, class_id: object) -> int:
        """Task index that introduces ``class_id``; raises UnknownClass otherwise."""
        cid = normalize_class_id(class_id)
        try:
            return self._task_by_class[cid]
        except KeyError:
            raise UnknownClass(f"class {cid!r} is not part of any task") from None

    def classes_of(self, task_index: int) -> frozenset[ClassId]:
        return self.tasks[task_index - 1].class_ids

    def classes_through(self, evaluation_index: int) -> frozenset[ClassId]:
        """All classes introduced by tasks 1..evaluation_index."""
        seen: set[ClassId] = set()
        for task in self.tasks[:evaluation_index]:
            seen.update(task.class_ids)
        return frozenset(seen)

    @property
    def all_classes(self) -> frozenset[ClassId]:
        return frozenset(self._task_by_class)


@dataclass(frozen=True)
class AccuracyTensor:
    """Per-class accuracy observations r[(i, k)] with their schedule.

    Lower-triangular: an entry for (evaluation i, class k) exists only when
    k's task started at or before i. Complete: for every evaluation index
    present, every seen class has exactly one entry. Values lie in [0, 1].
    Entries iterate in sorted (i, class_id) order.
    """

    schedule: TaskSchedule
    entries: Mapping[tuple[int, ClassId], float]

    def __init__(
        self,
        schedule: TaskSchedule,
        entries: Mapping[tuple[int, object], float] | Iterable[tuple[tuple[int, object], float]],
    ):
        object.__setattr__(self, "schedule", schedule)
        raw = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[tuple[int, ClassId], float] = {}
        for (i, k), value in raw:
            key = (i, normalize_class_id(k))
            if key in store:
                raise DuplicateObservation(
                    f"duplicate entry for evaluation {i}, class {key[1]!r}"
                )
            store[key] = value
        for (i, cid), value in store.items():
            introduced = schedule.task_of(cid)  # raises UnknownClass
            if introduced > i:
                raise UnseenClassObservation(
                    f"class {cid!r} belongs to task {introduced} but was "
                    f"observed at evaluation {i}"
                )
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeAccuracy(
                    f"accuracy {value!r} for evaluation {i}, class {cid!r} "
                    f"is outside [0, 1]"
                )
        present = sorted({i for i, _ in store})
        for i in present:
            for cid in sorted(schedule.classes_through(i)):
                if (i, cid) not in store:
                    raise MissingObservation(
                        f"evaluation {i} lacks an entry for seen class {cid!r}"
                    )
        ordered = {key: store[key] for key in sorted(store)}
        object.__setattr__(self, "entries", MappingProxyType(ordered))

    @property
    def evaluation_indices(self) -> tuple[int, ...]:
        return tuple(sorted({i for i, _ in self.entries}))

    def value(self, evaluation_index: int, class_id: object) -> float:
        return self.entries[(evaluation_index, normalize_class_id(class_id))]

    def at(self, evaluation_index: int) -> Iterator[tuple[ClassId, float]]:
        """(class_id, accuracy) pairs at one evaluation, sorted by class_id."""
        for (i, cid), value in self.entries.items():
            if i == evaluation_index:
                yield cid, value


@dataclass(frozen=True)
class RunLog:
    """One method's full incremental run: schedule, tensor, provenance.

    Evaluation indices present in the tensor are exactly 1..evaluated_through;
    partial runs (evaluated_through < number of tasks) are legal and metrics
    are computed up to the last complete evaluation.
    """

    method_name: str
    dataset_name: str
    seed: int
    buffer_per_class: int
    schedule: TaskSchedule
    tensor: AccuracyTensor
    evaluated_through: int

    def __post_init__(self):
        if self.buffer_per_class < 0:
            raise InvalidSchedule(
                f"buffer_per_class must be >= 0, got {self.buffer_per_class}"
            )
        if not 1 <= self.evaluated_through <= self.schedule.num_tasks:
            raise InvalidSchedule(
                f"evaluated_through {self.evaluated_through} outside "
                f"1..{self.schedule.num_tasks}"
            )
        if self.tensor.schedule != self.schedule:
            raise InvalidSchedule("tensor was built against a different schedule")
        expected = tuple(range(1, self.evaluated_through + 1))
        if self.tensor.evaluation_indices != expected:
            raise MissingObservation(
                f"evaluation indices {self.tensor.evaluation_indices} are not "
                f"contiguous 1..{self.evaluated_through}"
            )

    def observations(self) -> Iterator[tuple[int, ClassId, float]]:
        """Flattened (evaluation, class_id, accuracy) triples, sorted."""
        for (i, cid), value in self.tensor.entries.items():
            yield i, cid, value


@dataclass(frozen=True)
class MetricSeries:
    """A per-evaluation-step sequence of metric values.

    ``values[i - 1]`` is the metric after task i; None marks steps where the
    metric is undefined (e.g. backward transfer at step 1). Accuracy-derived
    metrics lie in [0, 1]; backward-transfer metrics lie in [-1, 1].
    """

    metric_name: str
    values: tuple[float | None, ...]

    def __post_init__(self):
        lo, hi = (-1.0, 1.0) if self.metric_name.startswith("bwt") else (0.0, 1.0)
        for step, value in enumerate(self.values, start=1):
            if value is not None and not lo <= value <= hi:
                raise OutOfRangeAccuracy(
                    f"{self.metric_name} value {value!r} at step {step} "
                    f"outside [{lo}, {hi}]"
                )

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float | None]:
        return iter(self.values)

    def defined_values(self) -> tuple[float, ...]:
        return tuple(v for v in self.values if v is not None)


def build_run_log(
    schedule: TaskSchedule,
    observations: Iterable[tuple[int, object, float]],
    *,
    method_name: str,
    dataset_name: str,
    seed: int,
    buffer_per_class: int = 0,
) -> RunLog:
    """Assemble and fully validate a RunLog from raw observation triples.

    Observations are (evaluation_index, class_id, accuracy) in any order.
    Rejects duplicates, out-of-range values, observations of unknown or
    not-yet-seen classes, and incomplete evaluations.
    """
    entries: dict[tuple[int, ClassId], float] = {}
    for i, k, value in observations:
        key = (i, normalize_class_id(k))
        if key in entries:
            raise DuplicateObservation(
                f"duplicate observation for evaluation {i}, class {key[1]!r}"
            )
        entries[key] = value
    if not entries:
        raise MissingObservation("run contains no observations")
    tensor = AccuracyTensor(schedule, entries)
    evaluated_through = max(i for i, _ in entries)
    return RunLog(
        method_name=method_name,
        dataset_name=dataset_name,
        seed=seed,
        buffer_per_class=buffer_per_class,
        schedule=schedule,
        tensor=tensor,
        evaluated_through=evaluated_through,
    )
