"""Parsing and validation of canonical run-log files.

The interchange format is UTF-8 JSON with extension ``.run.json`` and
``schema_version`` "1" (see ``docs/runlog-schema.md``). This module is the
boundary where all external data is checked: :func:`parse_run_log` enforces
structure and types, :func:`validate_and_build` enforces the semantic rules
and hands a fully validated :class:`~cilgauge.model.RunLog` back, and
:func:`load_run_set` ingests whole directories, grouping runs of the same
(method, dataset, buffer_per_class) and aggregating all failures instead of
stopping at the first.

Every rejection carries a field path (0-based array indices, e.g.
``evaluations[1].per_class.cat``) so diagnostics pinpoint the exact field.
Accuracies must be fractions in [0, 1]; percent-scaled inputs are rejected,
never rescaled. A ``per_class`` map may list not-yet-seen classes only with
an explicit ``null`` value, tolerating exporters that always emit the full
class list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import (
    CilGaugeError,
    DuplicateObservation,
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
    UnknownSchemaVersion,
    UnseenClassObservation,
)
from .model import RunLog, TaskSchedule, TaskSpec, build_run_log, normalize_class_id

SCHEMA_VERSION = "1"
RECOGNIZED_SCHEMA_VERSIONS = frozenset({SCHEMA_VERSION})
RUN_FILE_SUFFIX = ".run.json"


@dataclass(frozen=True)
class DocumentTask:
    task_index: int
    class_ids: tuple[str, ...]


@dataclass(frozen=True)
class DocumentEvaluation:
    after_task: int
    per_class: Mapping[str, float | None]


@dataclass(frozen=True)
class RunLogDocument:
    """Structurally validated run-log file content, prior to semantic checks."""

    schema_version: str
    method: str
    dataset: str
    seed: int
    buffer_per_class: int
    tasks: tuple[DocumentTask, ...]
    evaluations: tuple[DocumentEvaluation, ...]


class _DuplicateKey(Exception):
    def __init__(self, key: str):
        self.key = key


def _reject_duplicate_keys(pairs: list[tuple[str, object]]) -> dict:
    obj: dict = {}
    for key, value in pairs:
        if key in obj:
            raise _DuplicateKey(key)
        obj[key] = value
    return obj


def _require(obj: dict, name: str, path: str = "") -> object:
    if name not in obj:
        where = f"{path}.{name}" if path else name
        raise MissingField(f"required field {name!r} is missing", path=where)
    return obj[name]


def _as_int(value: object, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeMismatch(
            f"expected an integer, got {type(value).__name__}", path=path
        )
    return value


def _as_str(value: object, path: str) -> str:
    if not isinstance(value, str):
        raise TypeMismatch(f"expected a string, got {type(value).__name__}", path=path)
    return value


def parse_run_log(data: bytes | str) -> RunLogDocument:
    """Parse raw file content into a structurally valid document.

    Checks syntax, required fields, field types, schema version and the
    ordering of evaluations. Semantic rules (triangularity, completeness,
    disjointness, contiguity) belong to :func:`validate_and_build`.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedSyntax(
                f"not valid UTF-8 at byte {exc.start}", path=f"byte {exc.start}"
            ) from None
    else:
        text = data
    try:
        root = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except _DuplicateKey as exc:
        raise MalformedSyntax(f"duplicate key {exc.key!r}") from None
    except json.JSONDecodeError as exc:
        raise MalformedSyntax(
            f"invalid JSON: {exc.msg}", path=f"line {exc.lineno} column {exc.colno}"
        ) from None
    if not isinstance(root, dict):
        raise TypeMismatch(
            f"document root must be an object, got {type(root).__name__}", path=""
        )

    version = _as_str(_require(root, "schema_version"), "schema_version")
    if version not in RECOGNIZED_SCHEMA_VERSIONS:
        raise UnknownSchemaVersion(
            f"schema_version {version!r} is not recognized "
            f"(known: {sorted(RECOGNIZED_SCHEMA_VERSIONS)})",
            path="schema_version",
        )
    method = _as_str(_require(root, "method"), "method")
    dataset = _as_str(_require(root, "dataset"), "dataset")
    seed = _as_int(_require(root, "seed"), "seed")
    buffer_per_class = _as_int(_require(root, "buffer_per_class"), "buffer_per_class")
    if buffer_per_class < 0:
        raise TypeMismatch(
            f"buffer_per_class must be a non-negative integer, got {buffer_per_class}",
            path="buffer_per_class",
        )

    raw_tasks = _require(root, "tasks")
    if not isinstance(raw_tasks, list):
        raise TypeMismatch(
            f"expected a list, got {type(raw_tasks).__name__}", path="tasks"
        )
    tasks = []
    for n, raw_task in enumerate(raw_tasks):
        task_path = f"tasks[{n}]"
        if not isinstance(raw_task, dict):
            raise TypeMismatch(
                f"expected an object, got {type(raw_task).__name__}", path=task_path
            )
        index = _as_int(_require(raw_task, "task_index", task_path), f"{task_path}.task_index")
        raw_ids = _require(raw_task, "class_ids", task_path)
        ids_path = f"{task_path}.class_ids"
        if not isinstance(raw_ids, list):
            raise TypeMismatch(
                f"expected a list, got {type(raw_ids).__name__}", path=ids_path
            )
        ids = []
        for m, raw_id in enumerate(raw_ids):
            if isinstance(raw_id, bool) or not isinstance(raw_id, (str, int)):
                raise TypeMismatch(
                    f"class ids must be strings or integers, "
                    f"got {type(raw_id).__name__}",
                    path=f"{ids_path}[{m}]",
                )
            ids.append(normalize_class_id(raw_id))
        if len(set(ids)) != len(ids):
            raise MalformedSyntax("class_ids contains duplicates", path=ids_path)
        tasks.append(DocumentTask(task_index=index, class_ids=tuple(ids)))

    raw_evals = _require(root, "evaluations")
    if not isinstance(raw_evals, list):
        raise TypeMismatch(
            f"expected a list, got {type(raw_evals).__name__}", path="evaluations"
        )
    evaluations = []
    for n, raw_eval in enumerate(raw_evals):
        eval_path = f"evaluations[{n}]"
        if not isinstance(raw_eval, dict):
            raise TypeMismatch(
                f"expected an object, got {type(raw_eval).__name__}", path=eval_path
            )
        after_task = _as_int(
            _require(raw_eval, "after_task", eval_path), f"{eval_path}.after_task"
        )
        raw_per_class = _require(raw_eval, "per_class", eval_path)
        if not isinstance(raw_per_class, dict):
            raise TypeMismatch(
                f"expected an object, got {type(raw_per_class).__name__}",
                path=f"{eval_path}.per_class",
            )
        per_class: dict[str, float | None] = {}
        for raw_id, raw_value in raw_per_class.items():
            cid = normalize_class_id(raw_id)
            value_path = f"{eval_path}.per_class.{cid}"
            if raw_value is None:
                per_class[cid] = None
            elif isinstance(raw_value, bool) or not isinstance(raw_value, (int, float)):
                raise TypeMismatch(
                    f"accuracy must be a number or null, got {type(raw_value).__name__}",
                    path=value_path,
                )
            else:
                per_class[cid] = float(raw_value)
        evaluations.append(
            DocumentEvaluation(
                after_task=after_task,
                per_class=MappingProxyType(dict(sorted(per_class.items()))),
            )
        )
    order = [e.after_task for e in evaluations]
    if order != sorted(order):
        raise MalformedSyntax(
            "evaluations must be sorted by after_task ascending", path="evaluations"
        )

    return RunLogDocument(
        schema_version=version,
        method=method,
        dataset=dataset,
        seed=seed,
        buffer_per_class=buffer_per_class,
        tasks=tuple(tasks),
        evaluations=tuple(evaluations),
    )


def validate_and_build(doc: RunLogDocument) -> RunLog:
    """Apply semantic rules to a parsed document and build the RunLog.

    Checks task-index contiguity, class-set disjointness, evaluation-index
    contiguity and uniqueness, then interprets per_class entries: ``null`` is
    allowed (and dropped) only for classes whose task has not started yet;
    every seen class must carry a real value. Final authority stays with
    :func:`cilgauge.model.build_run_log`, which re-validates the assembled
    observations.
    """
    seen_classes: dict[str, int] = {}
    for n, task in enumerate(doc.tasks):
        if task.task_index != n + 1:
            raise InvalidSchedule(
                f"task indices must be contiguous 1..T; position {n} holds "
                f"task_index {task.task_index}",
                path=f"tasks[{n}].task_index",
            )
        for cid in task.class_ids:
            if cid in seen_classes:
                raise OverlappingTaskClasses(
                    f"class {cid!r} already belongs to task {seen_classes[cid]}",
                    path=f"tasks[{n}].class_ids",
                )
            seen_classes[cid] = task.task_index

    if not doc.evaluations:
        raise MissingObservation("document contains no evaluations", path="evaluations")
    after_tasks = [e.after_task for e in doc.evaluations]
    for n, value in enumerate(after_tasks):
        if value in after_tasks[:n]:
            raise DuplicateObservation(
                f"evaluation after_task={value} appears more than once",
                path=f"evaluations[{n}].after_task",
            )
    if after_tasks != list(range(1, len(after_tasks) + 1)):
        raise NonContiguousEvaluations(
            f"evaluation indices must be exactly 1..{len(after_tasks)}, "
            f"got {after_tasks}",
            path="evaluations",
        )
    if after_tasks[-1] > len(doc.tasks):
        raise NonContiguousEvaluations(
            f"evaluation after_task={after_tasks[-1]} exceeds the "
            f"{len(doc.tasks)} scheduled tasks",
            path=f"evaluations[{len(after_tasks) - 1}].after_task",
        )

    observations: list[tuple[int, str, float]] = []
    for n, evaluation in enumerate(doc.evaluations):
        i = evaluation.after_task
        seen_now = {c for c, t in seen_classes.items() if t <= i}
        for cid, value in evaluation.per_class.items():
            value_path = f"evaluations[{n}].per_class.{cid}"
            if cid not in seen_classes:
                raise UnknownClass(
                    f"class {cid!r} is not part of any task", path=value_path
                )
            if value is None:
                if cid in seen_now:
                    raise MissingObservation(
                        f"seen class {cid!r} has a null accuracy at evaluation {i}",
                        path=value_path,
                    )
                continue  # explicit null for a not-yet-seen class: tolerated
            if cid not in seen_now:
                raise UnseenClassObservation(
                    f"class {cid!r} belongs to task {seen_classes[cid]} but has "
                    f"a non-null accuracy at evaluation {i}",
                    path=value_path,
                )
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeAccuracy(
                    f"accuracy {value!r} is outside [0, 1] "
                    f"(fractions required, not percentages)",
                    path=value_path,
                )
            observations.append((i, cid, value))
        missing = seen_now - set(evaluation.per_class)
        if missing:
            raise MissingObservation(
                f"evaluation {i} lacks entries for seen classes "
                f"{sorted(missing)}",
                path=f"evaluations[{n}].per_class",
            )

    schedule = TaskSchedule(
        TaskSpec(task.task_index, task.class_ids) for task in doc.tasks
    )
    return build_run_log(
        schedule,
        observations,
        method_name=doc.method,
        dataset_name=doc.dataset,
        seed=doc.seed,
        buffer_per_class=doc.buffer_per_class,
    )


def document_from_run(run: RunLog) -> RunLogDocument:
    """Express a RunLog as its canonical document (no null entries)."""
    tasks = tuple(
        DocumentTask(task_index=t.task_index, class_ids=tuple(sorted(t.class_ids)))
        for t in run.schedule.tasks
    )
    evaluations = []
    for i in range(1, run.evaluated_through + 1):
        per_class = {cid: value for cid, value in run.tensor.at(i)}
        evaluations.append(
            DocumentEvaluation(after_task=i, per_class=MappingProxyType(per_class))
        )
    return RunLogDocument(
        schema_version=SCHEMA_VERSION,
        method=run.method_name,
        dataset=run.dataset_name,
        seed=run.seed,
        buffer_per_class=run.buffer_per_class,
        tasks=tasks,
        evaluations=tuple(evaluations),
    )


def serialize_document(doc: RunLogDocument) -> bytes:
    """Canonical UTF-8 JSON rendering; reparsing yields an equal document."""
    payload = {
        "schema_version": doc.schema_version,
        "method": doc.method,
        "dataset": doc.dataset,
        "seed": doc.seed,
        "buffer_per_class": doc.buffer_per_class,
        "tasks": [
            {"task_index": t.task_index, "class_ids": list(t.class_ids)}
            for t in doc.tasks
        ],
        "evaluations": [
            {"after_task": e.after_task, "per_class": dict(e.per_class)}
            for e in doc.evaluations
        ],
    }
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def load_run_log(path: str | Path) -> RunLog:
    """Parse and validate one run-log file."""
    return validate_and_build(parse_run_log(Path(path).read_bytes()))


@dataclass(frozen=True)
class RunGroup:
    """Runs sharing (method, dataset, buffer_per_class); same schedule required."""

    method: str
    dataset: str
    buffer_per_class: int
    runs: tuple[RunLog, ...]

    @property
    def seed_count(self) -> int:
        return len(self.runs)

    @property
    def schedule(self) -> TaskSchedule:
        return self.runs[0].schedule


def discover_run_files(target: str | Path) -> list[Path]:
    """A directory yields its *.run.json files sorted by name; a file, itself."""
    target = Path(target)
    if target.is_dir():
        return sorted(p for p in target.iterdir() if p.name.endswith(RUN_FILE_SUFFIX))
    return [target]


def load_run_set(targets: Sequence[str | Path] | str | Path) -> list[RunGroup]:
    """Load many run logs and group them by (method, dataset, buffer_per_class).

    ``targets`` may be a single path, a directory, or a sequence of either.
    All files are processed; failures (including schedule disagreements
    within a group) are aggregated into one :class:`RunSetError` rather than
    stopping at the first bad file.
    """
    if isinstance(targets, (str, Path)):
        targets = [targets]
    paths: list[Path] = []
    for target in targets:
        paths.extend(discover_run_files(target))

    failures: list[tuple[str, CilGaugeError]] = []
    loaded: list[tuple[Path, RunLog]] = []
    for path in paths:
        try:
            loaded.append((path, load_run_log(path)))
        except CilGaugeError as err:
            failures.append((str(path), err))
        except OSError as err:
            failures.append((str(path), MalformedSyntax(f"unreadable file: {err}")))

    grouped: dict[tuple[str, str, int], list[tuple[Path, RunLog]]] = {}
    for path, run in loaded:
        key = (run.method_name, run.dataset_name, run.buffer_per_class)
        grouped.setdefault(key, []).append((path, run))

    groups = []
    for key in sorted(grouped):
        members = grouped[key]
        reference_path, reference = members[0]
        consistent = [reference]
        for path, run in members[1:]:
            if run.schedule != reference.schedule:
                failures.append(
                    (
                        str(path),
                        ScheduleMismatchWithinGroup(
                            f"schedule differs from {reference_path} within group "
                            f"method={key[0]!r} dataset={key[1]!r} "
                            f"buffer_per_class={key[2]}",
                            path="tasks",
                        ),
                    )
                )
            else:
                consistent.append(run)
        groups.append(
            RunGroup(
                method=key[0],
                dataset=key[1],
                buffer_per_class=key[2],
                runs=tuple(sorted(consistent, key=lambda r: r.seed)),
            )
        )

    if failures:
        raise RunSetError(failures)
    return groups
