"""Deterministic synthetic run-log generation.

Produces run logs with controllable forgetting so metrics, demos and the CLI
can be exercised without training anything. Per-class accuracy after task i
for a class introduced at task j is

    clamp(initial_accuracy * retention**(i - j) + noise + class_offset,
          floor, 1.0)

where ``noise`` is drawn per (evaluation, class) from a seeded uniform
generator on [-noise_amplitude, +noise_amplitude) and ``class_offset`` is a
fixed per-class draw on [-per_class_jitter, +per_class_jitter).

Randomness comes from numpy's PCG64 bit generator (the PCG XSL RR 128/64
algorithm), so (schedule, profile, seed) fully determines the output,
bit-for-bit, across platforms. Draw order is fixed: one offset per class in
task order (class ids sorted within a task), then one noise value per
(evaluation, task, class) in ascending order. Draws happen even when the
amplitude is zero, so the stream position depends only on the schedule shape.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from numpy.random import PCG64, Generator

from .errors import InvalidProfile, MalformedSyntax, MissingField, TypeMismatch
from .ingest import document_from_run, serialize_document
from .model import ClassId, RunLog, TaskSchedule, TaskSpec, build_run_log


@dataclass(frozen=True)
class ForgettingProfile:
    """Parameters of the geometric-decay accuracy model.

    ``retention`` is the per-elapsed-task decay factor: 1.0 keeps accuracy
    flat, lower values forget faster. ``floor`` is the clamp below which no
    class falls. All parameters are fractions in [0, 1].
    """

    initial_accuracy: float
    retention: float
    floor: float = 0.0
    noise_amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("initial_accuracy", "retention", "floor", "noise_amplitude"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidProfile(f"{name} must be in [0, 1], got {value!r}")
        if self.floor > self.initial_accuracy:
            raise InvalidProfile(
                f"floor {self.floor!r} exceeds initial_accuracy "
                f"{self.initial_accuracy!r}"
            )


def generate_run(
    schedule: TaskSchedule,
    profile: ForgettingProfile,
    per_class_jitter: float = 0.0,
    *,
    method_name: str = "synthetic",
    dataset_name: str = "synthetic",
    buffer_per_class: int = 0,
) -> RunLog:
    """Generate one full run (all tasks evaluated) under a forgetting profile."""
    if not 0.0 <= per_class_jitter <= 1.0:
        raise InvalidProfile(
            f"per_class_jitter must be in [0, 1], got {per_class_jitter!r}"
        )
    rng = Generator(PCG64(profile.seed))

    offsets: dict[ClassId, float] = {}
    for task in schedule.tasks:
        for cid in sorted(task.class_ids):
            offsets[cid] = rng.uniform(-per_class_jitter, per_class_jitter)

    observations = []
    for i in range(1, schedule.num_tasks + 1):
        for j in range(1, i + 1):
            base = profile.initial_accuracy * profile.retention ** (i - j)
            for cid in sorted(schedule.classes_of(j)):
                noise = rng.uniform(-profile.noise_amplitude, profile.noise_amplitude)
                value = base + noise + offsets[cid]
                value = min(max(value, profile.floor), 1.0)
                observations.append((i, cid, value))

    return build_run_log(
        schedule,
        observations,
        method_name=method_name,
        dataset_name=dataset_name,
        seed=profile.seed,
        buffer_per_class=buffer_per_class,
    )


def generate_method_family(
    schedule: TaskSchedule,
    profiles: Mapping[str, ForgettingProfile],
    seeds: Sequence[int],
    per_class_jitter: float = 0.0,
    *,
    dataset_name: str = "synthetic",
    buffer_per_class: int = 0,
) -> list[RunLog]:
    """Cross product of named profiles and seeds, one run each.

    The profile name becomes the run's method name, so the result groups
    directly under run-set loading. Profiles are generated in name order,
    seeds in the order given.
    """
    if not profiles:
        raise ValueError("profiles must be non-empty")
    if not seeds:
        raise ValueError("seeds must be non-empty")
    runs = []
    for name in sorted(profiles):
        for seed in seeds:
            profile = dataclasses.replace(profiles[name], seed=seed)
            runs.append(
                generate_run(
                    schedule,
                    profile,
                    per_class_jitter,
                    method_name=name,
                    dataset_name=dataset_name,
                    buffer_per_class=buffer_per_class,
                )
            )
    return runs


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", text)


def run_file_name(run: RunLog) -> str:
    return (
        f"{_slug(run.method_name)}__{_slug(run.dataset_name)}"
        f"__b{run.buffer_per_class}__s{run.seed}.run.json"
    )


def write_run(run: RunLog, directory: str | Path) -> Path:
    """Write a run as a canonical .run.json file; returns the path written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / run_file_name(run)
    path.write_bytes(serialize_document(document_from_run(run)))
    return path


@dataclass(frozen=True)
class SimulationConfig:
    """Parsed content of a simulate config file (JSON, see README)."""

    schedule: TaskSchedule
    profiles: Mapping[str, ForgettingProfile]
    seeds: tuple[int, ...]
    per_class_jitter: float
    dataset: str
    buffer_per_class: int


_PROFILE_FIELDS = {"initial_accuracy", "retention", "floor", "noise_amplitude"}


def load_simulation_config(path: str | Path) -> SimulationConfig:
    """Read a simulate config file.

    Required keys: ``tasks`` (same shape as in run-log files), ``profiles``
    (name -> profile parameters) and ``seeds``. Optional: ``per_class_jitter``
    (default 0), ``dataset`` (default "synthetic"), ``buffer_per_class``
    (default 0).
    """
    raw_text = Path(path).read_bytes()
    try:
        root = json.loads(raw_text)
    except json.JSONDecodeError as exc:
        raise MalformedSyntax(
            f"invalid JSON: {exc.msg}", path=f"line {exc.lineno} column {exc.colno}"
        ) from None
    if not isinstance(root, dict):
        raise TypeMismatch("config root must be an object", path="")

    for required in ("tasks", "profiles", "seeds"):
        if required not in root:
            raise MissingField(f"config requires {required!r}", path=required)

    tasks = []
    for n, raw_task in enumerate(root["tasks"]):
        if not isinstance(raw_task, dict) or not {"task_index", "class_ids"} <= set(raw_task):
            raise TypeMismatch(
                "each task needs task_index and class_ids", path=f"tasks[{n}]"
            )
        tasks.append(TaskSpec(raw_task["task_index"], raw_task["class_ids"]))
    schedule = TaskSchedule(tasks)

    raw_profiles = root["profiles"]
    if not isinstance(raw_profiles, dict) or not raw_profiles:
        raise TypeMismatch("profiles must be a non-empty object", path="profiles")
    profiles = {}
    for name, params in raw_profiles.items():
        if not isinstance(params, dict):
            raise TypeMismatch("profile must be an object", path=f"profiles.{name}")
        unknown = set(params) - _PROFILE_FIELDS
        if unknown:
            raise TypeMismatch(
                f"unknown profile keys {sorted(unknown)}", path=f"profiles.{name}"
            )
        try:
            profiles[name] = ForgettingProfile(**params)
        except TypeError as exc:
            raise TypeMismatch(str(exc), path=f"profiles.{name}") from None

    seeds = root["seeds"]
    if (
        not isinstance(seeds, list)
        or not seeds
        or not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds)
    ):
        raise TypeMismatch("seeds must be a non-empty list of integers", path="seeds")

    jitter = root.get("per_class_jitter", 0.0)
    if isinstance(jitter, bool) or not isinstance(jitter, (int, float)):
        raise TypeMismatch("per_class_jitter must be a number", path="per_class_jitter")

    dataset = root.get("dataset", "synthetic")
    if not isinstance(dataset, str):
        raise TypeMismatch("dataset must be a string", path="dataset")
    buffer_per_class = root.get("buffer_per_class", 0)
    if isinstance(buffer_per_class, bool) or not isinstance(buffer_per_class, int):
        raise TypeMismatch(
            "buffer_per_class must be an integer", path="buffer_per_class"
        )

    return SimulationConfig(
        schedule=schedule,
        profiles=profiles,
        seeds=tuple(seeds),
        per_class_jitter=float(jitter),
        dataset=dataset,
        buffer_per_class=buffer_per_class,
    )
