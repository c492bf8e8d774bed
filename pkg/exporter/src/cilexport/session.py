"""Record an incremental training run and export it as a run-log file.

One :class:`ExportSession` accompanies one training run. Call
:meth:`~ExportSession.begin_task` before training each task,
:meth:`~ExportSession.record_evaluation` with the per-class test accuracies
measured right after it, and :meth:`~ExportSession.finalize` to write the
canonical ``.run.json`` file (schema version "1").

The adapter transports accuracies; it computes no metrics. It enforces the
file contract as data arrives (contiguous tasks, disjoint classes, complete
evaluations, fractional accuracies) and re-validates the assembled document
before writing, so an invalid file is never produced. Sessions are not safe
for concurrent mutation: one training run, one thread, one session.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    EvaluationOutOfOrder,
    IncompleteEvaluation,
    NonContiguousTask,
    OutOfRangeAccuracy,
    OverlappingClasses,
    ValidationFailed,
)

SCHEMA_VERSION = "1"


def _normalize_class_id(raw: object) -> str:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise TypeError(f"class id must be str or int, got {type(raw).__name__}")
    return str(raw)


class ExportSession:
    """Accumulates one run's schedule and evaluations, then writes the file."""

    def __init__(
        self,
        method: str,
        dataset: str,
        seed: int,
        buffer_per_class: int = 0,
    ):
        if buffer_per_class < 0:
            raise ValidationFailed("buffer_per_class must be >= 0")
        self.method = method
        self.dataset = dataset
        self.seed = seed
        self.buffer_per_class = buffer_per_class
        self._tasks: list[tuple[int, tuple[str, ...]]] = []
        self._seen: set[str] = set()
        self._evaluations: list[tuple[int, dict[str, float]]] = []
        self._finalized = False

    @property
    def tasks_begun(self) -> int:
        return len(self._tasks)

    @property
    def evaluations_recorded(self) -> int:
        return len(self._evaluations)

    def begin_task(self, task_index: int, class_ids: Iterable[object]) -> None:
        """Announce the next task and the classes it introduces."""
        self._check_open()
        if task_index != len(self._tasks) + 1:
            raise NonContiguousTask(
                f"expected task {len(self._tasks) + 1}, got {task_index}"
            )
        ids = [_normalize_class_id(c) for c in class_ids]
        if not ids:
            raise ValidationFailed(f"task {task_index} introduces no classes")
        if len(set(ids)) != len(ids):
            raise OverlappingClasses(f"task {task_index} repeats a class id")
        clashes = self._seen.intersection(ids)
        if clashes:
            raise OverlappingClasses(
                f"classes already introduced earlier: {sorted(clashes)}"
            )
        self._tasks.append((task_index, tuple(sorted(ids))))
        self._seen.update(ids)

    def record_evaluation(
        self, after_task: int, per_class: Mapping[object, float]
    ) -> None:
        """Store the per-class test accuracies measured after one task.

        Must cover every class seen so far, exactly once, with fractions in
        [0, 1]; follows the task just begun.
        """
        self._check_open()
        expected = len(self._evaluations) + 1
        if after_task != len(self._tasks) or after_task != expected:
            raise EvaluationOutOfOrder(
                f"evaluation after_task={after_task} does not follow the task "
                f"just begun (begun: {len(self._tasks)}, "
                f"evaluations recorded: {len(self._evaluations)})"
            )
        values: dict[str, float] = {}
        for raw_id, raw_value in per_class.items():
            cid = _normalize_class_id(raw_id)
            if cid in values:
                raise IncompleteEvaluation(f"class {cid!r} listed twice")
            if isinstance(raw_value, bool) or not isinstance(raw_value, (int, float)):
                raise OutOfRangeAccuracy(
                    f"accuracy for class {cid!r} must be a number, "
                    f"got {type(raw_value).__name__}"
                )
            value = float(raw_value)
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeAccuracy(
                    f"accuracy {value!r} for class {cid!r} outside [0, 1] "
                    f"(use fractions, not percentages)"
                )
            values[cid] = value
        unknown = set(values) - self._seen
        if unknown:
            raise IncompleteEvaluation(
                f"classes not introduced by any task: {sorted(unknown)}"
            )
        missing = self._seen - set(values)
        if missing:
            raise IncompleteEvaluation(
                f"evaluation {after_task} lacks seen classes: {sorted(missing)}"
            )
        self._evaluations.append((after_task, dict(sorted(values.items()))))

    def document(self) -> dict:
        """The run-log document this session would write."""
        return {
            "schema_version": SCHEMA_VERSION,
            "method": self.method,
            "dataset": self.dataset,
            "seed": self.seed,
            "buffer_per_class": self.buffer_per_class,
            "tasks": [
                {"task_index": index, "class_ids": list(ids)}
                for index, ids in self._tasks
            ],
            "evaluations": [
                {"after_task": after_task, "per_class": dict(per_class)}
                for after_task, per_class in self._evaluations
            ],
        }

    def finalize(self, path: str | Path) -> Path:
        """Validate the assembled document and write it; locks the session."""
        self._check_open()
        document = self.document()
        problems = validate_document(document)
        if problems:
            raise ValidationFailed("; ".join(problems))
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(
            (json.dumps(document, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
        )
        self._finalized = True
        return path

    def _check_open(self) -> None:
        if self._finalized:
            raise ValidationFailed("session already finalized")


def validate_document(document: dict) -> list[str]:
    """Check a run-log document against the published schema rules.

    Returns a list of problems (empty when valid). Independent of the
    session's incremental checks so finalize re-verifies the whole artifact.
    """
    problems: list[str] = []
    for field_name, kind in (
        ("schema_version", str),
        ("method", str),
        ("dataset", str),
        ("seed", int),
        ("buffer_per_class", int),
        ("tasks", list),
        ("evaluations", list),
    ):
        if field_name not in document:
            problems.append(f"missing field {field_name!r}")
        elif not isinstance(document[field_name], kind) or isinstance(
            document[field_name], bool
        ):
            problems.append(f"{field_name} must be {kind.__name__}")
    if problems:
        return problems
    if document["schema_version"] != SCHEMA_VERSION:
        problems.append(f"schema_version must be {SCHEMA_VERSION!r}")
    if document["buffer_per_class"] < 0:
        problems.append("buffer_per_class must be >= 0")

    seen: set[str] = set()
    for n, task in enumerate(document["tasks"]):
        if task.get("task_index") != n + 1:
            problems.append(f"tasks[{n}].task_index must be {n + 1}")
        ids = task.get("class_ids", [])
        if not ids:
            problems.append(f"tasks[{n}].class_ids must be non-empty")
        for cid in ids:
            if cid in seen:
                problems.append(f"tasks[{n}]: class {cid!r} overlaps earlier task")
            seen.add(cid)
    if not document["tasks"]:
        problems.append("tasks must be non-empty")

    if not document["evaluations"]:
        problems.append("at least one evaluation is required")
    seen_by_task: list[set[str]] = []
    running: set[str] = set()
    for task in document["tasks"]:
        running = running | set(task.get("class_ids", []))
        seen_by_task.append(set(running))
    for n, evaluation in enumerate(document["evaluations"]):
        after_task = evaluation.get("after_task")
        if after_task != n + 1:
            problems.append(f"evaluations[{n}].after_task must be {n + 1}")
            continue
        if after_task > len(document["tasks"]):
            problems.append(f"evaluations[{n}] refers to an unscheduled task")
            continue
        per_class = evaluation.get("per_class", {})
        expected = seen_by_task[after_task - 1]
        if set(per_class) != expected:
            problems.append(
                f"evaluations[{n}].per_class must cover exactly the seen "
                f"classes {sorted(expected)}"
            )
        for cid, value in per_class.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                problems.append(f"evaluations[{n}].per_class.{cid} must be a number")
            elif not 0.0 <= value <= 1.0:
                problems.append(
                    f"evaluations[{n}].per_class.{cid} outside [0, 1]"
                )
    return problems
