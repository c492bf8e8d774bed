"""Metric formulas against hand-derived values and the brute-force oracle."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cilgauge import (
    EmptySeries,
    MetricSeries,
    TaskSchedule,
    TaskSpec,
    acc_series,
    build_run_log,
    bwt_gem_series,
    bwt_series,
    class_distribution,
    mica_old_series,
    mica_series,
    task_matrix,
    wamica,
)
from conftest import (
    RUNNING_EXAMPLE_OBS,
    RUNNING_EXAMPLE_TASKS,
    make_run_from_case,
    run_logs,
)
from oracle import BruteForce, random_case

TOL = 1e-12


def approx(value, expected):
    return value == pytest.approx(expected, abs=TOL)


class TestRunningExample:
    """Frozen values, derived by the brute-force oracle before the build."""

    def test_task_matrix(self, running_example):
        matrix = task_matrix(running_example.tensor)
        assert approx(matrix.value(1, 1), 0.8)
        assert approx(matrix.value(2, 1), 0.5)
        assert approx(matrix.value(2, 2), 0.85)
        with pytest.raises(ValueError):
            matrix.value(1, 2)  # above the diagonal

    def test_acc(self, running_example):
        series = acc_series(task_matrix(running_example.tensor))
        assert approx(series.values[0], 0.8)
        assert approx(series.values[1], 0.675)

    def test_bwt(self, running_example):
        series = bwt_series(task_matrix(running_example.tensor))
        assert series.values[0] is None
        assert approx(series.values[1], 0.35)

    def test_bwt_gem(self, running_example):
        series = bwt_gem_series(task_matrix(running_example.tensor))
        assert series.values[0] is None
        assert approx(series.values[1], -0.3)  # 0.5 - 0.8: forgetting is negative

    def test_mica_with_argmin(self, running_example):
        series = mica_series(running_example.tensor)
        assert approx(series.values[0], 0.7)
        assert approx(series.values[1], 0.4)
        assert series.argmin_classes == (("1",), ("1",))

    def test_mica_old(self, running_example):
        series = mica_old_series(running_example.tensor)
        assert series.values[0] is None
        assert approx(series.values[1], 0.4)

    def test_wamica(self, running_example):
        summary = wamica(mica_series(running_example.tensor))
        assert approx(summary.mica_min, 0.4)
        assert approx(summary.mica_max, 0.7)
        assert approx(summary.weight_w, 0.7)
        assert approx(summary.wamica, 0.385)

    def test_distribution_at_step_two(self, running_example):
        dist = class_distribution(running_example.tensor, 2)
        assert approx(dist.minimum, 0.4)
        assert approx(dist.q1, 0.55)
        assert approx(dist.median, 0.7)
        assert approx(dist.q3, 0.825)
        assert approx(dist.maximum, 0.9)
        assert approx(dist.mean, 0.675)
        assert dist.count == 4


class TestDegenerateCases:
    def test_singleton_tasks_copy_values(self):
        run = make_run_from_case(
            {1: ["a"], 2: ["b"]},
            {(1, "a"): 0.62, (2, "a"): 0.31, (2, "b"): 0.97},
        )
        matrix = task_matrix(run.tensor)
        assert matrix.value(1, 1) == 0.62
        assert matrix.value(2, 1) == 0.31
        assert matrix.value(2, 2) == 0.97

    def test_constant_field(self):
        tasks = {1: ["a", "b"], 2: ["c"]}
        obs = {
            (i, k): 0.6
            for i in (1, 2)
            for j in range(1, i + 1)
            for k in tasks[j]
        }
        run = make_run_from_case(tasks, obs)
        matrix = task_matrix(run.tensor)
        assert all(v == 0.6 for v in acc_series(matrix).values)
        assert all(v == 0.6 for v in mica_series(run.tensor).values)
        bwt = bwt_series(matrix)
        assert bwt.values[0] is None
        assert approx(bwt.values[1], 0.0)
        summary = wamica(mica_series(run.tensor))
        assert summary.weight_w == 1.0
        assert approx(summary.wamica, 0.6)

    def test_single_task_acc_is_task_accuracy(self):
        run = make_run_from_case({1: ["a", "b"]}, {(1, "a"): 0.5, (1, "b"): 0.9})
        matrix = task_matrix(run.tensor)
        assert acc_series(matrix).values == (matrix.value(1, 1),)

    def test_mica_old_exclusion_semantics(self):
        run = make_run_from_case(
            {1: ["old"], 2: ["new"]},
            {(1, "old"): 1.0, (2, "old"): 1.0, (2, "new"): 0.0},
        )
        assert mica_series(run.tensor).values[1] == 0.0
        assert mica_old_series(run.tensor).values[1] == 1.0

    def test_mica_argmin_reports_all_ties_sorted(self):
        run = make_run_from_case(
            {1: ["z", "a", "m"]},
            {(1, "z"): 0.3, (1, "a"): 0.3, (1, "m"): 0.8},
        )
        assert mica_series(run.tensor).argmin_classes == (("a", "z"),)

    def test_single_class_distribution_collapses(self):
        run = make_run_from_case({1: ["only"]}, {(1, "only"): 0.42})
        dist = class_distribution(run.tensor, 1)
        assert (
            dist.minimum
            == dist.q1
            == dist.median
            == dist.q3
            == dist.maximum
            == dist.mean
            == 0.42
        )
        assert dist.count == 1

    def test_distribution_rejects_absent_step(self, running_example):
        with pytest.raises(ValueError):
            class_distribution(running_example.tensor, 3)


class TestWamicaEdges:
    def test_two_point_series(self):
        summary = wamica(MetricSeries("mica", (0.9, 0.1)))
        assert approx(summary.weight_w, 0.2)
        assert approx(summary.wamica, 0.1)

    def test_constant_series_keeps_its_mean(self):
        summary = wamica(MetricSeries("mica", (0.8, 0.8, 0.8)))
        assert summary.weight_w == 1.0
        assert approx(summary.wamica, 0.8)

    def test_empty_series_rejected(self):
        with pytest.raises(EmptySeries):
            wamica(MetricSeries("mica", ()))

    def test_undefined_values_rejected(self):
        with pytest.raises(EmptySeries):
            wamica(MetricSeries("mica", (0.5, None)))


def assert_matches_oracle(tasks, obs, upto):
    run = make_run_from_case(tasks, obs)
    assert run.evaluated_through == upto
    reference = BruteForce(tasks, obs)

    matrix = task_matrix(run.tensor)
    acc = acc_series(matrix)
    bwt = bwt_series(matrix)
    bwt_gem = bwt_gem_series(matrix)
    mica = mica_series(run.tensor)
    mica_old = mica_old_series(run.tensor)

    for i in range(1, upto + 1):
        for j in range(1, i + 1):
            assert abs(matrix.value(i, j) - reference.r(i, j)) < TOL
        assert abs(acc.values[i - 1] - reference.acc(i)) < TOL
        assert abs(mica.values[i - 1] - reference.mica(i)) < TOL
        assert mica.argmin_classes[i - 1] == reference.mica_argmin(i)
        for series, ref in ((bwt, reference.bwt), (bwt_gem, reference.bwt_gem), (mica_old, reference.mica_old)):
            expected = ref(i)
            got = series.values[i - 1]
            if expected is None:
                assert got is None
            else:
                assert abs(got - expected) < TOL
        dist = class_distribution(run.tensor, i)
        ref_dist = reference.distribution(i)
        for mine, theirs in (
            (dist.minimum, "min"),
            (dist.q1, "q1"),
            (dist.median, "median"),
            (dist.q3, "q3"),
            (dist.maximum, "max"),
            (dist.mean, "mean"),
        ):
            assert abs(mine - ref_dist[theirs]) < TOL
        assert dist.count == ref_dist["count"]

    summary = wamica(mica)
    low, high, weight, value = reference.wamica()
    assert abs(summary.mica_min - low) < TOL
    assert abs(summary.mica_max - high) < TOL
    assert abs(summary.weight_w - weight) < TOL
    assert abs(summary.wamica - value) < TOL


@pytest.mark.parametrize("seed", range(25))
def test_oracle_equivalence_sampled(seed):
    tasks, obs, upto = random_case(random.Random(seed))
    assert_matches_oracle(tasks, obs, upto)


@given(run_logs())
@settings(max_examples=60)
def test_ordering_identities(run):
    """mica <= every task accuracy <= acc <= max task accuracy; w in [0, 1]."""
    matrix = task_matrix(run.tensor)
    acc = acc_series(matrix)
    mica = mica_series(run.tensor)
    mica_old = mica_old_series(run.tensor)
    for i in range(1, run.evaluated_through + 1):
        row = [matrix.value(i, j) for j in range(1, i + 1)]
        assert mica.values[i - 1] <= min(row) + TOL
        assert min(row) <= acc.values[i - 1] + TOL
        assert acc.values[i - 1] <= max(row) + TOL
        if i >= 2:
            assert mica.values[i - 1] <= mica_old.values[i - 1] + TOL
        assert class_distribution(run.tensor, i).minimum == mica.values[i - 1]
    summary = wamica(mica)
    assert 0.0 <= summary.weight_w <= 1.0
    mean_mica = math.fsum(mica.values) / len(mica)
    assert summary.wamica <= mean_mica + TOL
    assert mean_mica <= summary.mica_max + TOL
    if summary.mica_max > summary.mica_min:
        assert summary.wamica < mean_mica


@given(run_logs(), st.randoms(use_true_random=False))
@settings(max_examples=40)
def test_permutation_invariance(run, rng):
    """Observation input order changes no metric value."""
    observations = list(run.observations())
    rng.shuffle(observations)
    shuffled = build_run_log(
        run.schedule,
        observations,
        method_name=run.method_name,
        dataset_name=run.dataset_name,
        seed=run.seed,
    )
    assert task_matrix(shuffled.tensor).rows == task_matrix(run.tensor).rows
    assert mica_series(shuffled.tensor) == mica_series(run.tensor)


@given(run_logs())
@settings(max_examples=40)
def test_relabeling_invariance(run):
    """Renaming classes (within their tasks) changes values, not metrics."""
    rename = {cid: f"renamed_{cid}" for cid in run.schedule.all_classes}
    schedule = TaskSchedule(
        TaskSpec(t.task_index, [rename[c] for c in t.class_ids])
        for t in run.schedule.tasks
    )
    relabeled = build_run_log(
        schedule,
        [(i, rename[k], v) for i, k, v in run.observations()],
        method_name=run.method_name,
        dataset_name=run.dataset_name,
        seed=run.seed,
    )
    assert task_matrix(relabeled.tensor).rows == task_matrix(run.tensor).rows
    assert mica_series(relabeled.tensor).values == mica_series(run.tensor).values
    assert (
        wamica(mica_series(relabeled.tensor)).wamica
        == wamica(mica_series(run.tensor)).wamica
    )


@given(run_logs(), st.data())
@settings(max_examples=40)
def test_monotone_response(run, data):
    """Decreasing one observation weakly decreases acc and mica at its step
    and never increases the mica-series mean."""
    keys = sorted(run.tensor.entries)
    i, cid = data.draw(st.sampled_from(keys))
    old_value = run.tensor.value(i, cid)
    new_value = data.draw(
        st.integers(0, max(0, int(round(old_value * 100)))).map(lambda n: n / 100)
    )
    lowered = build_run_log(
        run.schedule,
        [
            (ii, kk, new_value if (ii, kk) == (i, cid) else vv)
            for ii, kk, vv in run.observations()
        ],
        method_name=run.method_name,
        dataset_name=run.dataset_name,
        seed=run.seed,
    )
    acc_before = acc_series(task_matrix(run.tensor)).values
    acc_after = acc_series(task_matrix(lowered.tensor)).values
    mica_before = mica_series(run.tensor).values
    mica_after = mica_series(lowered.tensor).values
    assert acc_after[i - 1] <= acc_before[i - 1] + TOL
    assert mica_after[i - 1] <= mica_before[i - 1] + TOL
    assert (
        math.fsum(mica_after) / len(mica_after)
        <= math.fsum(mica_before) / len(mica_before) + TOL
    )
