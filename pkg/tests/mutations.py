"""Catalog of invariant-violating mutations of a valid run-log file.

One entry per ingestion error class (12 in total). Every mutation must be
rejected with a diagnostic that names a field path; none may be silently
accepted. The schedule-mismatch case needs two files and is handled apart
from the single-file table.
"""

from __future__ import annotations

import copy
import json

from cilgauge.errors import (
    DuplicateObservation,
    MalformedSyntax,
    MissingField,
    MissingObservation,
    NonContiguousEvaluations,
    OutOfRangeAccuracy,
    OverlappingTaskClasses,
    TypeMismatch,
    UnknownClass,
    UnknownSchemaVersion,
    UnseenClassObservation,
)


def _encode(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _mutated(doc: dict, apply) -> bytes:
    clone = copy.deepcopy(doc)
    apply(clone)
    return _encode(clone)


def malformed_syntax(doc: dict) -> bytes:
    return _mutated(doc, lambda d: d["evaluations"].reverse())


def unknown_schema_version(doc: dict) -> bytes:
    return _mutated(doc, lambda d: d.update(schema_version="999"))


def missing_field(doc: dict) -> bytes:
    def apply(d):
        del d["seed"]

    return _mutated(doc, apply)


def type_mismatch(doc: dict) -> bytes:
    def apply(d):
        d["evaluations"][0]["per_class"]["0"] = "0.9"

    return _mutated(doc, apply)


def duplicate_observation(doc: dict) -> bytes:
    def apply(d):
        d["evaluations"].append(copy.deepcopy(d["evaluations"][-1]))

    return _mutated(doc, apply)


def missing_observation(doc: dict) -> bytes:
    def apply(d):
        del d["evaluations"][1]["per_class"]["1"]

    return _mutated(doc, apply)


def unseen_class_observation(doc: dict) -> bytes:
    def apply(d):
        d["evaluations"][0]["per_class"]["2"] = 0.5

    return _mutated(doc, apply)


def out_of_range_accuracy(doc: dict) -> bytes:
    def apply(d):
        d["evaluations"][1]["per_class"]["3"] = 1.2

    return _mutated(doc, apply)


def unknown_class(doc: dict) -> bytes:
    def apply(d):
        d["evaluations"][1]["per_class"]["ghost"] = 0.5

    return _mutated(doc, apply)


def non_contiguous_evaluations(doc: dict) -> bytes:
    def apply(d):
        d["evaluations"][1]["after_task"] = 3

    return _mutated(doc, apply)


def overlapping_task_classes(doc: dict) -> bytes:
    def apply(d):
        d["tasks"][1]["class_ids"] = ["2", "0"]

    return _mutated(doc, apply)


# (name, expected error class, mutate(valid document dict) -> file bytes)
SINGLE_FILE_MUTATIONS = [
    ("malformed_syntax", MalformedSyntax, malformed_syntax),
    ("unknown_schema_version", UnknownSchemaVersion, unknown_schema_version),
    ("missing_field", MissingField, missing_field),
    ("type_mismatch", TypeMismatch, type_mismatch),
    ("duplicate_observation", DuplicateObservation, duplicate_observation),
    ("missing_observation", MissingObservation, missing_observation),
    ("unseen_class_observation", UnseenClassObservation, unseen_class_observation),
    ("out_of_range_accuracy", OutOfRangeAccuracy, out_of_range_accuracy),
    ("unknown_class", UnknownClass, unknown_class),
    ("non_contiguous_evaluations", NonContiguousEvaluations, non_contiguous_evaluations),
    ("overlapping_task_classes", OverlappingTaskClasses, overlapping_task_classes),
]


def schedule_mismatch_sibling(doc: dict) -> bytes:
    """Same (method, dataset, buffer) and internally consistent, but the
    classes are split across tasks differently than in the original."""
    clone = copy.deepcopy(doc)
    clone["seed"] = doc["seed"] + 1
    clone["tasks"][0]["class_ids"] = ["0", "2"]
    clone["tasks"][1]["class_ids"] = ["1", "3"]
    clone["evaluations"][0]["per_class"] = {"0": 0.9, "2": 0.7}
    return _encode(clone)
