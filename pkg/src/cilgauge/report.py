"""Comparison reports, tables and plot-ready data.

Seed aggregation is metrics-first: every metric is computed per run, then
averaged over the seeds of a group. Tensors are never averaged. Fractions are
kept everywhere; percentages appear only at render time, as the fraction
times 100 rounded half-to-even to two decimals.

Rendering is a pure function of the report: identical inputs produce
byte-identical output. Best-per-column values are marked with a ``*`` suffix;
ANSI emphasis is layered on only when the stream is a terminal and the
CILGAUGE_NO_COLOR environment variable is unset.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from .errors import UnknownFigureName, UnknownMetricName
from .ingest import RunGroup
from .metrics import (
    DistributionSummary,
    MicaSeries,
    MetricSeries,
    TaskAccuracyMatrix,
    WamicaSummary,
    acc_series,
    bwt_gem_series,
    bwt_series,
    class_distribution,
    mica_old_series,
    mica_series,
    task_matrix,
    wamica,
)
from .model import RunLog

METRIC_NAMES = ("acc", "bwt", "bwt_gem", "mica", "mica_old", "wamica", "distribution")
FIGURE_NAMES = ("acc", "mica", "boxplot", "wamica-surface")


@dataclass(frozen=True)
class RunMetrics:
    """Every metric of one run, computed once."""

    run: RunLog
    matrix: TaskAccuracyMatrix
    acc: MetricSeries
    bwt: MetricSeries
    bwt_gem: MetricSeries
    mica: MicaSeries
    mica_old: MetricSeries
    wamica_summary: WamicaSummary
    distributions: tuple[DistributionSummary, ...]

    @property
    def acc_final(self) -> float:
        return self.acc.values[-1]

    @property
    def mica_mean(self) -> float:
        return math.fsum(self.mica.values) / len(self.mica)


def compute_run_metrics(run: RunLog) -> RunMetrics:
    matrix = task_matrix(run.tensor)
    mica = mica_series(run.tensor)
    return RunMetrics(
        run=run,
        matrix=matrix,
        acc=acc_series(matrix),
        bwt=bwt_series(matrix),
        bwt_gem=bwt_gem_series(matrix),
        mica=mica,
        mica_old=mica_old_series(run.tensor),
        wamica_summary=wamica(mica),
        distributions=tuple(
            class_distribution(run.tensor, i)
            for i in range(1, run.evaluated_through + 1)
        ),
    )


def mean_over_seeds(series_list: list[tuple[float | None, ...]]) -> tuple[float | None, ...]:
    """Per-step arithmetic mean across runs; steps missing in a partial run
    are averaged over the runs that reached them."""
    length = max(len(s) for s in series_list)
    out: list[float | None] = []
    for step in range(length):
        present = [s[step] for s in series_list if step < len(s) and s[step] is not None]
        out.append(math.fsum(present) / len(present) if present else None)
    return tuple(out)


def std_over_seeds(values: list[float]) -> float:
    """Sample standard deviation (ddof=1); 0.0 for a single seed."""
    if len(values) < 2:
        return 0.0
    center = math.fsum(values) / len(values)
    return math.sqrt(
        math.fsum((v - center) ** 2 for v in values) / (len(values) - 1)
    )


@dataclass(frozen=True)
class GroupMetrics:
    """Per-seed metrics of one group plus seed-mean series and scalars."""

    group: RunGroup
    per_run: tuple[RunMetrics, ...]
    acc_mean: tuple[float | None, ...]
    bwt_mean: tuple[float | None, ...]
    bwt_gem_mean: tuple[float | None, ...]
    mica_mean_series: tuple[float | None, ...]
    mica_old_mean: tuple[float | None, ...]
    acc_final_mean: float
    acc_final_std: float
    wamica_mean: float
    wamica_std: float
    mica_scalar_mean: float
    weight_mean: float


def compute_group_metrics(group: RunGroup) -> GroupMetrics:
    per_run = tuple(compute_run_metrics(run) for run in group.runs)
    acc_finals = [m.acc_final for m in per_run]
    wamicas = [m.wamica_summary.wamica for m in per_run]
    return GroupMetrics(
        group=group,
        per_run=per_run,
        acc_mean=mean_over_seeds([m.acc.values for m in per_run]),
        bwt_mean=mean_over_seeds([m.bwt.values for m in per_run]),
        bwt_gem_mean=mean_over_seeds([m.bwt_gem.values for m in per_run]),
        mica_mean_series=mean_over_seeds([m.mica.values for m in per_run]),
        mica_old_mean=mean_over_seeds([m.mica_old.values for m in per_run]),
        acc_final_mean=math.fsum(acc_finals) / len(acc_finals),
        acc_final_std=std_over_seeds(acc_finals),
        wamica_mean=math.fsum(wamicas) / len(wamicas),
        wamica_std=std_over_seeds(wamicas),
        mica_scalar_mean=math.fsum(m.mica_mean for m in per_run) / len(per_run),
        weight_mean=math.fsum(m.wamica_summary.weight_w for m in per_run)
        / len(per_run),
    )


@dataclass(frozen=True)
class ComparisonReport:
    """All groups' metrics, ready for tabular or plot-data rendering."""

    groups: tuple[GroupMetrics, ...]


def build_report(groups: list[RunGroup]) -> ComparisonReport:
    return ComparisonReport(groups=tuple(compute_group_metrics(g) for g in groups))


def render_percent(fraction: float) -> str:
    """Fraction -> percent string, two decimals, banker's rounding."""
    scaled = Decimal(repr(fraction)) * 100
    return str(scaled.quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


def format_value(value: float | None, marked: bool = False) -> str:
    if value is None:
        return "undef"
    text = f"{value:.4f}"
    return text + "!" if marked else text


def format_series(values: tuple[float | None, ...], flagged: set[int] | None = None) -> str:
    """Comma-joined 4-decimal values; flagged steps carry a '!' suffix."""
    flagged = flagged or set()
    return ", ".join(
        format_value(v, marked=(step in flagged))
        for step, v in enumerate(values, start=1)
    )


# ---------------------------------------------------------------------------
# Comparison tables
# ---------------------------------------------------------------------------


def _bold(text: str) -> str:
    return f"\x1b[1m{text}\x1b[0m"


def render_comparison_table(report: ComparisonReport, color: bool = False) -> str:
    """One aligned table per dataset: method rows, buffer x (ACC, WAMICA) columns.

    The best (largest) value in each column is suffixed with ``*``. Emits a
    byte-identical result for identical reports when ``color`` is False.
    """
    datasets: dict[str, list[GroupMetrics]] = {}
    for gm in report.groups:
        datasets.setdefault(gm.group.dataset, []).append(gm)

    blocks = []
    for dataset in sorted(datasets):
        members = datasets[dataset]
        buffers = sorted({gm.group.buffer_per_class for gm in members})
        methods = sorted({gm.group.method for gm in members})
        by_cell = {(gm.group.method, gm.group.buffer_per_class): gm for gm in members}

        header = ["method"]
        for buffer in buffers:
            header.append(f"b={buffer} ACC %")
            header.append(f"b={buffer} WAMICA %")

        best: dict[int, float] = {}
        rows: list[list[tuple[str, bool]]] = []
        for method in methods:
            row: list[tuple[str, bool]] = [(method, False)]
            for column_base, buffer in enumerate(buffers):
                gm = by_cell.get((method, buffer))
                for offset, value in enumerate(
                    (gm.acc_final_mean, gm.wamica_mean) if gm else (None, None)
                ):
                    column = 1 + 2 * column_base + offset
                    if value is None:
                        row.append(("-", False))
                        continue
                    row.append((render_percent(value), False))
                    if column not in best or value > best[column]:
                        best[column] = value
            rows.append(row)
        # second pass: mark the best value per column
        for row_index, method in enumerate(methods):
            for column_base, buffer in enumerate(buffers):
                gm = by_cell.get((method, buffer))
                if gm is None:
                    continue
                for offset, value in enumerate((gm.acc_final_mean, gm.wamica_mean)):
                    column = 1 + 2 * column_base + offset
                    if value == best[column]:
                        text, _ = rows[row_index][column]
                        rows[row_index][column] = (text + "*", True)

        widths = [len(h) for h in header]
        for row in rows:
            for c, (text, _) in enumerate(row):
                widths[c] = max(widths[c], len(text))

        lines = [f"dataset: {dataset}"]
        lines.append("  ".join(h.ljust(widths[c]) for c, h in enumerate(header)))
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            cells = []
            for c, (text, is_best) in enumerate(row):
                padded = text.ljust(widths[c]) if c == 0 else text.rjust(widths[c])
                cells.append(_bold(padded) if (color and is_best) else padded)
            lines.append("  ".join(cells))
        seeds = ", ".join(
            f"{gm.group.method}/b{gm.group.buffer_per_class}: {gm.group.seed_count}"
            for gm in sorted(
                members, key=lambda g: (g.group.method, g.group.buffer_per_class)
            )
        )
        lines.append(f"seeds per group: {seeds}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def comparison_rows(report: ComparisonReport) -> list[dict]:
    """Flat per-group records backing the CSV and JSON mirrors of the table."""
    datasets: dict[str, list[GroupMetrics]] = {}
    for gm in report.groups:
        datasets.setdefault(gm.group.dataset, []).append(gm)
    best_acc: dict[tuple[str, int], float] = {}
    best_wamica: dict[tuple[str, int], float] = {}
    for gm in report.groups:
        key = (gm.group.dataset, gm.group.buffer_per_class)
        if key not in best_acc or gm.acc_final_mean > best_acc[key]:
            best_acc[key] = gm.acc_final_mean
        if key not in best_wamica or gm.wamica_mean > best_wamica[key]:
            best_wamica[key] = gm.wamica_mean

    rows = []
    for gm in sorted(
        report.groups,
        key=lambda g: (g.group.dataset, g.group.method, g.group.buffer_per_class),
    ):
        key = (gm.group.dataset, gm.group.buffer_per_class)
        rows.append(
            {
                "dataset": gm.group.dataset,
                "method": gm.group.method,
                "buffer_per_class": gm.group.buffer_per_class,
                "seed_count": gm.group.seed_count,
                "acc_mean": gm.acc_final_mean,
                "acc_std": gm.acc_final_std,
                "acc_percent": render_percent(gm.acc_final_mean),
                "wamica_mean": gm.wamica_mean,
                "wamica_std": gm.wamica_std,
                "wamica_percent": render_percent(gm.wamica_mean),
                "mica_mean": gm.mica_scalar_mean,
                "weight_mean": gm.weight_mean,
                "best_acc": gm.acc_final_mean == best_acc[key],
                "best_wamica": gm.wamica_mean == best_wamica[key],
            }
        )
    return rows


def render_comparison_csv(report: ComparisonReport) -> str:
    rows = comparison_rows(report)
    buffer = io.StringIO()
    fields = [
        "dataset",
        "method",
        "buffer_per_class",
        "seed_count",
        "acc_mean",
        "acc_std",
        "acc_percent",
        "wamica_mean",
        "wamica_std",
        "wamica_percent",
        "mica_mean",
        "weight_mean",
        "best_acc",
        "best_wamica",
    ]
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row[k]) for k in fields})
    return buffer.getvalue()


def render_comparison_json(report: ComparisonReport) -> str:
    return json.dumps({"groups": comparison_rows(report)}, indent=2) + "\n"


def schedule_mismatch_warnings(report: ComparisonReport) -> list[str]:
    """Within-dataset schedule disagreements between method groups.

    Legal (buffer budgets or methods may be benchmarked on different splits)
    but suspicious inside one table, so compare proceeds with a warning.
    """
    datasets: dict[str, list[GroupMetrics]] = {}
    for gm in report.groups:
        datasets.setdefault(gm.group.dataset, []).append(gm)
    warnings = []
    for dataset in sorted(datasets):
        members = datasets[dataset]
        reference = members[0].group
        for gm in members[1:]:
            if gm.group.schedule != reference.schedule:
                warnings.append(
                    f"warning: schedules differ within dataset {dataset!r} "
                    f"(method {reference.method!r} vs {gm.group.method!r}); "
                    f"comparing anyway"
                )
                break
    return warnings


# ---------------------------------------------------------------------------
# Plot data
# ---------------------------------------------------------------------------


def _csv_cell(value: object) -> object:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", text)


def _group_slug(gm: GroupMetrics) -> str:
    g = gm.group
    return f"{_slug(g.method)}__{_slug(g.dataset)}__b{g.buffer_per_class}"


def _write_csv(path: Path, header: list[str], rows: list[list[object]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(cell) for cell in row])


def emit_plot_data(report: ComparisonReport, figure: str, out_dir: str | Path) -> list[Path]:
    """Write CSV series for one figure kind; returns the files written.

    * ``acc``: per group, (step, mean, one column per seed).
    * ``mica``: as ``acc`` plus companion ACC columns for overlaying.
    * ``boxplot``: per group, per (seed, step) five-number summary + mean.
    * ``wamica-surface``: a 101x101 grid of w * mean over (mean mica, w),
      plus one point per group at its seed-mean coordinates.
    """
    if figure not in FIGURE_NAMES:
        raise UnknownFigureName(
            f"unknown figure {figure!r} (choose from {', '.join(FIGURE_NAMES)})"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if figure in ("acc", "mica"):
        for gm in report.groups:
            seeds = [m.run.seed for m in gm.per_run]
            steps = max(len(m.acc) for m in gm.per_run)
            if figure == "acc":
                header = ["step", "mean"] + [f"seed_{s}" for s in seeds]
                rows = []
                for step in range(steps):
                    row: list[object] = [step + 1, gm.acc_mean[step]]
                    row += [
                        m.acc.values[step] if step < len(m.acc) else None
                        for m in gm.per_run
                    ]
                    rows.append(row)
            else:
                header = (
                    ["step", "mica_mean"]
                    + [f"mica_seed_{s}" for s in seeds]
                    + ["acc_mean"]
                    + [f"acc_seed_{s}" for s in seeds]
                )
                rows = []
                for step in range(steps):
                    row = [step + 1, gm.mica_mean_series[step]]
                    row += [
                        m.mica.values[step] if step < len(m.mica) else None
                        for m in gm.per_run
                    ]
                    row.append(gm.acc_mean[step])
                    row += [
                        m.acc.values[step] if step < len(m.acc) else None
                        for m in gm.per_run
                    ]
                    rows.append(row)
            path = out / f"{figure}__{_group_slug(gm)}.csv"
            _write_csv(path, header, rows)
            written.append(path)

    elif figure == "boxplot":
        for gm in report.groups:
            header = ["seed", "step", "min", "q1", "median", "q3", "max", "mean", "count"]
            rows = []
            for run_metrics in gm.per_run:
                for step, dist in enumerate(run_metrics.distributions, start=1):
                    rows.append(
                        [
                            run_metrics.run.seed,
                            step,
                            dist.minimum,
                            dist.q1,
                            dist.median,
                            dist.q3,
                            dist.maximum,
                            dist.mean,
                            dist.count,
                        ]
                    )
            path = out / f"boxplot__{_group_slug(gm)}.csv"
            _write_csv(path, header, rows)
            written.append(path)

    else:  # wamica-surface
        grid_rows: list[list[object]] = []
        for mica_step in range(101):
            mean_mica = mica_step / 100
            for w_step in range(101):
                weight = w_step / 100
                grid_rows.append([mean_mica, weight, weight * mean_mica])
        surface_path = out / "wamica_surface.csv"
        _write_csv(surface_path, ["mean_mica", "w", "wamica"], grid_rows)
        written.append(surface_path)

        point_rows = []
        for gm in report.groups:
            point_rows.append(
                [
                    gm.group.method,
                    gm.group.dataset,
                    gm.group.buffer_per_class,
                    gm.mica_scalar_mean,
                    gm.weight_mean,
                    gm.wamica_mean,
                ]
            )
        points_path = out / "wamica_points.csv"
        _write_csv(
            points_path,
            ["method", "dataset", "buffer_per_class", "mean_mica", "w", "wamica"],
            point_rows,
        )
        written.append(points_path)

    return written


# ---------------------------------------------------------------------------
# Metric listings (cilgauge metrics)
# ---------------------------------------------------------------------------


def resolve_metric_names(requested: tuple[str, ...]) -> tuple[str, ...]:
    """Expand/validate --metric values; 'all' selects every metric."""
    if not requested:
        return METRIC_NAMES
    names: list[str] = []
    for name in requested:
        for part in name.split(","):
            part = part.strip()
            if not part:
                continue
            if part == "all":
                names.extend(METRIC_NAMES)
            elif part in METRIC_NAMES:
                names.append(part)
            else:
                raise UnknownMetricName(
                    f"unknown metric {part!r} "
                    f"(choose from {', '.join(METRIC_NAMES)} or 'all')"
                )
    deduped = []
    for name in names:
        if name not in deduped:
            deduped.append(name)
    return tuple(deduped)


def flagged_steps(mica: MetricSeries, threshold: float | None) -> set[int]:
    """1-based steps whose minimum class accuracy falls below the threshold."""
    if threshold is None:
        return set()
    return {
        step
        for step, value in enumerate(mica.values, start=1)
        if value is not None and value < threshold
    }


def _series_of(metrics: RunMetrics, name: str) -> tuple[float | None, ...]:
    return {
        "acc": metrics.acc.values,
        "bwt": metrics.bwt.values,
        "bwt_gem": metrics.bwt_gem.values,
        "mica": metrics.mica.values,
        "mica_old": metrics.mica_old.values,
    }[name]


def render_metrics_text(
    report: ComparisonReport,
    metric_names: tuple[str, ...],
    threshold: float | None = None,
) -> str:
    """Per-run and per-group metric listing in plain text."""
    lines = []
    for gm in report.groups:
        g = gm.group
        for m in gm.per_run:
            lines.append(
                f"run method={g.method} dataset={g.dataset} "
                f"buffer={g.buffer_per_class} seed={m.run.seed}"
            )
            flags = flagged_steps(m.mica, threshold)
            for name in metric_names:
                if name == "wamica":
                    s = m.wamica_summary
                    lines.append(
                        f"  wamica: {format_value(s.wamica)} "
                        f"(w={format_value(s.weight_w)}, "
                        f"min={format_value(s.mica_min)}, "
                        f"max={format_value(s.mica_max)})"
                    )
                elif name == "distribution":
                    for step, dist in enumerate(m.distributions, start=1):
                        lines.append(
                            f"  distribution[{step}]: min={format_value(dist.minimum)} "
                            f"q1={format_value(dist.q1)} median={format_value(dist.median)} "
                            f"q3={format_value(dist.q3)} max={format_value(dist.maximum)} "
                            f"mean={format_value(dist.mean)} n={dist.count}"
                        )
                elif name == "mica":
                    lines.append(f"  mica: {format_series(m.mica.values, flags)}")
                else:
                    lines.append(f"  {name}: {format_series(_series_of(m, name))}")
            if threshold is not None and flags:
                lines.append(
                    f"  threshold {format_value(threshold)}: steps below: "
                    + ", ".join(str(s) for s in sorted(flags))
                )
        if gm.group.seed_count > 1:
            lines.append(
                f"group method={g.method} dataset={g.dataset} "
                f"buffer={g.buffer_per_class} seeds={gm.group.seed_count}"
            )
            group_flags = flagged_steps(
                MetricSeries("mica", gm.mica_mean_series), threshold
            )
            for name in metric_names:
                series = {
                    "acc": gm.acc_mean,
                    "bwt": gm.bwt_mean,
                    "bwt_gem": gm.bwt_gem_mean,
                    "mica": gm.mica_mean_series,
                    "mica_old": gm.mica_old_mean,
                }.get(name)
                if name == "wamica":
                    lines.append(
                        f"  wamica mean: {format_value(gm.wamica_mean)} "
                        f"(std={format_value(gm.wamica_std)})"
                    )
                elif series is not None:
                    marked = group_flags if name == "mica" else None
                    lines.append(f"  {name} mean: {format_series(series, marked)}")
    return "\n".join(lines) + "\n"


def metrics_records(
    report: ComparisonReport,
    metric_names: tuple[str, ...],
    threshold: float | None = None,
) -> list[dict]:
    """Step-level records backing the metrics CSV/JSON output."""
    records = []
    for gm in report.groups:
        g = gm.group
        for m in gm.per_run:
            flags = flagged_steps(m.mica, threshold)
            identity = {
                "method": g.method,
                "dataset": g.dataset,
                "buffer_per_class": g.buffer_per_class,
                "scope": "run",
                "seed": m.run.seed,
            }
            for name in metric_names:
                if name == "wamica":
                    s = m.wamica_summary
                    records.append(
                        identity
                        | {
                            "metric": "wamica",
                            "step": None,
                            "value": s.wamica,
                            "flagged": False,
                        }
                    )
                elif name == "distribution":
                    for step, dist in enumerate(m.distributions, start=1):
                        records.append(
                            identity
                            | {
                                "metric": "distribution",
                                "step": step,
                                "value": None,
                                "min": dist.minimum,
                                "q1": dist.q1,
                                "median": dist.median,
                                "q3": dist.q3,
                                "max": dist.maximum,
                                "mean": dist.mean,
                                "count": dist.count,
                                "flagged": False,
                            }
                        )
                else:
                    values = _series_of(m, name)
                    for step, value in enumerate(values, start=1):
                        records.append(
                            identity
                            | {
                                "metric": name,
                                "step": step,
                                "value": value,
                                "flagged": name == "mica" and step in flags,
                            }
                        )
    return records


def render_metrics_csv(
    report: ComparisonReport,
    metric_names: tuple[str, ...],
    threshold: float | None = None,
) -> str:
    records = metrics_records(report, metric_names, threshold)
    fields = [
        "method",
        "dataset",
        "buffer_per_class",
        "scope",
        "seed",
        "metric",
        "step",
        "value",
        "flagged",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "mean",
        "count",
    ]
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=fields, lineterminator="\n", restval=""
    )
    writer.writeheader()
    for record in records:
        writer.writerow(
            {
                key: ("" if value is None else _csv_cell(value))
                for key, value in record.items()
            }
        )
    return buffer.getvalue()


def render_metrics_json(
    report: ComparisonReport,
    metric_names: tuple[str, ...],
    threshold: float | None = None,
) -> str:
    payload = {
        "metrics": metric_names,
        "threshold": threshold,
        "records": metrics_records(report, metric_names, threshold),
    }
    return json.dumps(payload, indent=2) + "\n"
