"""Command-line interface: cilgauge validate|metrics|compare|plot-data|simulate.

Exit codes: 0 success, 1 validation/data failure, 2 usage error, 3 at least
one step fell below a --threshold (monitoring mode). Set CILGAUGE_NO_COLOR
to disable ANSI emphasis; plain output already marks best values with ``*``.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .errors import (
    CilGaugeError,
    RunSetError,
    UnknownFigureName,
    UnknownMetricName,
)
from .ingest import discover_run_files, load_run_set, parse_run_log, validate_and_build
from .report import (
    FIGURE_NAMES,
    build_report,
    emit_plot_data,
    flagged_steps,
    render_comparison_csv,
    render_comparison_json,
    render_comparison_table,
    render_metrics_csv,
    render_metrics_json,
    render_metrics_text,
    resolve_metric_names,
    schedule_mismatch_warnings,
)
from .synth import generate_method_family, load_simulation_config, write_run

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_THRESHOLD = 3


def _color_enabled() -> bool:
    if os.environ.get("CILGAUGE_NO_COLOR"):
        return False
    return sys.stdout.isatty()


def _load_groups(targets: tuple[str, ...]):
    try:
        return load_run_set(list(targets))
    except RunSetError as err:
        for source, failure in err.failures:
            click.echo(f"{source}: {failure}", err=True)
        sys.exit(EXIT_VALIDATION)


@click.group()
@click.version_option(package_name="cilgauge")
def main():
    """Worst-case metrics for class-incremental learning run logs."""


@main.command("validate")
@click.argument("paths", nargs=-1, type=click.Path())
def cmd_validate(paths: tuple[str, ...]):
    """Check run-log files; exit 0 only if every file is valid."""
    if not paths:
        raise click.UsageError("provide at least one file or directory to validate")
    files: list[Path] = []
    for target in paths:
        files.extend(discover_run_files(target))
    if not files:
        raise click.UsageError("no .run.json files found under the given paths")
    failures = 0
    for path in files:
        try:
            validate_and_build(parse_run_log(Path(path).read_bytes()))
        except CilGaugeError as err:
            click.echo(f"{path}: {err}")
            failures += 1
        except OSError as err:
            click.echo(f"{path}: unreadable: {err}")
            failures += 1
    if failures:
        click.echo(f"{failures} of {len(files)} files failed validation")
        sys.exit(EXIT_VALIDATION)
    click.echo(f"{len(files)} files OK")


@main.command("metrics")
@click.argument("paths", nargs=-1, type=click.Path())
@click.option(
    "--metric",
    "metric_selection",
    multiple=True,
    help="Metric to show (repeatable, comma-separable, or 'all'). "
    "Default: all metrics.",
)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["table", "csv", "json"]),
    default="table",
    show_default=True,
)
@click.option(
    "--threshold",
    type=float,
    default=None,
    help="Flag steps whose minimum class accuracy falls below this fraction; "
    "exit 3 if any step is flagged.",
)
def cmd_metrics(paths, metric_selection, output_format, threshold):
    """Compute metric series per run and per seed group."""
    if not paths:
        raise click.UsageError("provide at least one file or directory")
    try:
        names = resolve_metric_names(metric_selection)
    except UnknownMetricName as err:
        raise click.UsageError(str(err)) from None
    report = build_report(_load_groups(paths))
    if output_format == "table":
        click.echo(render_metrics_text(report, names, threshold), nl=False)
    elif output_format == "csv":
        click.echo(render_metrics_csv(report, names, threshold), nl=False)
    else:
        click.echo(render_metrics_json(report, names, threshold), nl=False)
    if threshold is not None:
        breached = any(
            flagged_steps(m.mica, threshold)
            for gm in report.groups
            for m in gm.per_run
        )
        if breached:
            sys.exit(EXIT_THRESHOLD)


@main.command("compare")
@click.argument("paths", nargs=-1, type=click.Path())
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["table", "csv", "json"]),
    default="table",
    show_default=True,
)
def cmd_compare(paths, output_format):
    """Comparison table: methods x buffer budgets, ACC and WAMICA side by side."""
    if not paths:
        raise click.UsageError("provide at least one file or directory")
    report = build_report(_load_groups(paths))
    if not report.groups:
        raise click.UsageError("no run groups found under the given paths")
    for warning in schedule_mismatch_warnings(report):
        click.echo(warning, err=True)
    if output_format == "table":
        click.echo(render_comparison_table(report, color=_color_enabled()), nl=False)
    elif output_format == "csv":
        click.echo(render_comparison_csv(report), nl=False)
    else:
        click.echo(render_comparison_json(report), nl=False)


@main.command("plot-data")
@click.argument("paths", nargs=-1, type=click.Path())
@click.option(
    "--figure",
    required=True,
    help=f"One of: {', '.join(FIGURE_NAMES)}.",
)
@click.option(
    "--out",
    "out_dir",
    required=True,
    type=click.Path(file_okay=False),
    help="Directory to write CSV files into (created if missing).",
)
def cmd_plot_data(paths, figure, out_dir):
    """Emit plot-ready CSV series for one figure kind."""
    if not paths:
        raise click.UsageError("provide at least one file or directory")
    report = build_report(_load_groups(paths))
    try:
        written = emit_plot_data(report, figure, out_dir)
    except UnknownFigureName as err:
        raise click.UsageError(str(err)) from None
    except OSError as err:
        click.echo(f"cannot write to {out_dir}: {err}", err=True)
        sys.exit(EXIT_VALIDATION)
    for path in written:
        click.echo(str(path))


@main.command("simulate")
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(),
    help="JSON config: tasks, profiles, seeds (see README).",
)
@click.option(
    "--out",
    "out_dir",
    required=True,
    type=click.Path(file_okay=False),
    help="Directory to write .run.json files into (created if missing).",
)
def cmd_simulate(config_path, out_dir):
    """Generate deterministic synthetic run logs from a profile config."""
    try:
        config = load_simulation_config(config_path)
        runs = generate_method_family(
            config.schedule,
            config.profiles,
            config.seeds,
            config.per_class_jitter,
            dataset_name=config.dataset,
            buffer_per_class=config.buffer_per_class,
        )
        for run in runs:
            click.echo(str(write_run(run, out_dir)))
    except FileNotFoundError as err:
        click.echo(f"config not found: {err.filename}", err=True)
        sys.exit(EXIT_VALIDATION)
    except (CilGaugeError, ValueError, OSError) as err:
        click.echo(f"simulate failed: {err}", err=True)
        sys.exit(EXIT_VALIDATION)


if __name__ == "__main__":
    main()
