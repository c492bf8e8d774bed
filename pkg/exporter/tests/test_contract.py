"""Cross-component contract: everything this adapter writes, the primary
harness accepts — exercised through the `cilgauge` CLI only (no imports)."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from cilexport import ExportSession

TOY_SCRIPT = Path(__file__).resolve().parent.parent / "examples" / "train_toy.py"


def cilgauge(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "cilgauge.cli", *args],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "CILGAUGE_NO_COLOR": "1"},
    )


pytestmark = pytest.mark.skipif(
    cilgauge("--version").returncode != 0,
    reason="the cilgauge harness is not installed",
)


def test_handwritten_session_accepted(tmp_path):
    session = ExportSession(method="m", dataset="d", seed=1, buffer_per_class=20)
    session.begin_task(1, ["a", "b"])
    session.record_evaluation(1, {"a": 0.91, "b": 0.72})
    session.begin_task(2, ["c"])
    session.record_evaluation(2, {"a": 0.66, "b": 0.47, "c": 0.88})
    path = session.finalize(tmp_path / "session.run.json")

    result = cilgauge("validate", str(path))
    assert result.returncode == 0, result.stdout + result.stderr
    assert "1 files OK" in result.stdout


def test_partial_session_accepted(tmp_path):
    session = ExportSession(method="m", dataset="d", seed=2)
    session.begin_task(1, ["a"])
    session.record_evaluation(1, {"a": 0.8})
    session.begin_task(2, ["b"])  # crashed before evaluating task 2
    path = session.finalize(tmp_path / "partial.run.json")
    assert cilgauge("validate", str(path)).returncode == 0


def test_toy_training_loop_end_to_end(tmp_path):
    """A real (tiny) classifier trained over 2 tasks exports a file that the
    harness validates, and the harness's mica series equals the minimum of
    the exporter's own in-memory accuracies."""
    out = tmp_path / "toy.run.json"
    train = subprocess.run(
        [
            sys.executable,
            str(TOY_SCRIPT),
            "--out",
            str(out),
            "--seed",
            "0",
            "--emit-accuracies",
        ],
        capture_output=True,
        text=True,
    )
    assert train.returncode == 0, train.stderr
    recorded = json.loads(train.stdout)
    assert set(recorded) == {"1", "2"}

    validated = cilgauge("validate", str(out))
    assert validated.returncode == 0, validated.stdout + validated.stderr

    metrics = cilgauge("metrics", str(out), "--metric", "mica")
    assert metrics.returncode == 0, metrics.stdout + metrics.stderr
    expected = ", ".join(
        f"{min(recorded[str(i)].values()):.4f}" for i in (1, 2)
    )
    assert f"mica: {expected}" in metrics.stdout

    # the model must actually have learned and then forgotten something,
    # otherwise the fixture proves nothing
    assert min(recorded["1"].values()) > 0.8
    assert min(recorded["2"].values()) < min(recorded["1"].values())
