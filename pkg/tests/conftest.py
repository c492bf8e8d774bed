"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import strategies as st

from cilgauge import RunLog, TaskSchedule, TaskSpec, build_run_log

FIXTURES = Path(__file__).parent / "fixtures"

RUNNING_EXAMPLE_TASKS = {1: ["0", "1"], 2: ["2", "3"]}
RUNNING_EXAMPLE_OBS = {
    (1, "0"): 0.9,
    (1, "1"): 0.7,
    (2, "0"): 0.6,
    (2, "1"): 0.4,
    (2, "2"): 0.9,
    (2, "3"): 0.8,
}


def make_running_example(**metadata) -> RunLog:
    defaults = dict(method_name="running", dataset_name="example", seed=0)
    defaults.update(metadata)
    schedule = TaskSchedule([TaskSpec(1, ["0", "1"]), TaskSpec(2, ["2", "3"])])
    return build_run_log(
        schedule,
        [(i, k, v) for (i, k), v in RUNNING_EXAMPLE_OBS.items()],
        **defaults,
    )


@pytest.fixture
def running_example() -> RunLog:
    return make_running_example()


def make_run_from_case(
    tasks: dict[int, list[str]],
    obs: dict[tuple[int, str], float],
    **metadata,
) -> RunLog:
    defaults = dict(method_name="m", dataset_name="d", seed=0)
    defaults.update(metadata)
    schedule = TaskSchedule(
        [TaskSpec(j, tasks[j]) for j in sorted(tasks)]
    )
    return build_run_log(
        schedule, [(i, k, v) for (i, k), v in obs.items()], **defaults
    )


@pytest.fixture
def minimal_document() -> dict:
    return json.loads((FIXTURES / "minimal.run.json").read_text())


@pytest.fixture
def two_task_document() -> dict:
    return json.loads((FIXTURES / "running_example.run.json").read_text())


# ---------------------------------------------------------------------------
# Hypothesis strategies
# ---------------------------------------------------------------------------


@st.composite
def schedules(draw, max_tasks: int = 5, max_classes: int = 4) -> TaskSchedule:
    sizes = draw(
        st.lists(
            st.integers(1, max_classes), min_size=1, max_size=max_tasks
        )
    )
    tasks = []
    next_id = 0
    for j, size in enumerate(sizes, start=1):
        tasks.append(TaskSpec(j, [f"c{next_id + m}" for m in range(size)]))
        next_id += size
    return TaskSchedule(tasks)


@st.composite
def run_logs(draw, max_tasks: int = 5, max_classes: int = 4) -> RunLog:
    """Valid runs with accuracies on a 0.01 grid; possibly partial."""
    schedule = draw(schedules(max_tasks=max_tasks, max_classes=max_classes))
    upto = draw(st.integers(1, schedule.num_tasks))
    observations = []
    for i in range(1, upto + 1):
        for cid in sorted(schedule.classes_through(i)):
            observations.append((i, cid, draw(st.integers(0, 100)) / 100))
    return build_run_log(
        schedule,
        observations,
        method_name="hyp",
        dataset_name="hyp",
        seed=draw(st.integers(0, 10)),
    )
