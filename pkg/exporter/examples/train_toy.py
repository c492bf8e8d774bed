"""Toy two-task incremental training run exported as a .run.json file.

Trains a linear classifier on 2D gaussian blobs, two tasks of two classes
each, measuring per-class test accuracy after each task and recording it
through an ExportSession. The second task is trained without revisiting the
first task's data, so the first two classes degrade — enough structure for
the worst-case metrics downstream to show something.

Usage:
    python train_toy.py --out run.run.json [--seed 0] [--emit-accuracies]

With --emit-accuracies the script prints the recorded accuracies as JSON to
stdout, letting callers cross-check the written file against the in-memory
values.
"""

from __future__ import annotations

import argparse
import json

import numpy as np
from sklearn.linear_model import SGDClassifier

from cilexport import ExportSession

TASKS = {1: ["0", "1"], 2: ["2", "3"]}
CENTERS = {
    "0": (-2.0, -2.0),
    "1": (2.0, 2.0),
    "2": (-2.0, 2.0),
    "3": (2.0, -2.0),
}
TRAIN_PER_CLASS = 200
TEST_PER_CLASS = 100
EPOCHS_PER_TASK = 5


def make_class_data(rng: np.random.Generator, class_id: str, count: int) -> np.ndarray:
    center = np.asarray(CENTERS[class_id])
    return rng.normal(loc=center, scale=1.0, size=(count, 2))


def per_class_accuracy(model, test_sets: dict[str, np.ndarray]) -> dict[str, float]:
    out = {}
    for class_id, features in test_sets.items():
        predicted = model.predict(features)
        out[class_id] = float(np.mean(predicted == int(class_id)))
    return out


def run_training(seed: int) -> tuple[ExportSession, dict[int, dict[str, float]]]:
    rng = np.random.default_rng(seed)
    train = {
        cid: make_class_data(rng, cid, TRAIN_PER_CLASS)
        for ids in TASKS.values()
        for cid in ids
    }
    test = {
        cid: make_class_data(rng, cid, TEST_PER_CLASS)
        for ids in TASKS.values()
        for cid in ids
    }

    model = SGDClassifier(loss="log_loss", random_state=seed)
    all_labels = np.array([int(c) for ids in TASKS.values() for c in ids])

    session = ExportSession(
        method="sgd-toy", dataset="blobs", seed=seed, buffer_per_class=0
    )
    recorded: dict[int, dict[str, float]] = {}
    seen: list[str] = []
    for task_index in sorted(TASKS):
        class_ids = TASKS[task_index]
        session.begin_task(task_index, class_ids)
        seen.extend(class_ids)

        features = np.concatenate([train[cid] for cid in class_ids])
        labels = np.concatenate(
            [np.full(len(train[cid]), int(cid)) for cid in class_ids]
        )
        order = rng.permutation(len(labels))
        for _ in range(EPOCHS_PER_TASK):
            model.partial_fit(features[order], labels[order], classes=all_labels)

        accuracies = per_class_accuracy(model, {cid: test[cid] for cid in seen})
        session.record_evaluation(task_index, accuracies)
        recorded[task_index] = accuracies
    return session, recorded


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="path of the .run.json to write")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--emit-accuracies",
        action="store_true",
        help="print the recorded per-class accuracies as JSON to stdout",
    )
    args = parser.parse_args()

    session, recorded = run_training(args.seed)
    path = session.finalize(args.out)
    if args.emit_accuracies:
        print(json.dumps({str(k): v for k, v in recorded.items()}))
    else:
        print(f"wrote {path}")
        for task_index, accuracies in recorded.items():
            worst = min(accuracies.values())
            print(f"  after task {task_index}: worst class accuracy {worst:.3f}")


if __name__ == "__main__":
    main()
