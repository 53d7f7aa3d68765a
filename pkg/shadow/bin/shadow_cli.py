#!/usr/bin/env python3
# MIT License
#
# Copyright (c) 2022 Karl Nicoll
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

import functools
import logging
from typing import List, Optional, Tuple

import click

from shadow.indices import (
    DistributionSummary,
    IndexKind,
    WeightKind,
    load_dataset,
    load_thresholds,
    summarize,
    validate_dataset,
)
from shadow.indices.errors import (
    ComputationError,
    ConfigurationError,
    DataError,
    OutputError,
)
from shadow.indices.ingestion import Period, parse_period
from shadow.indices.subindex import (
    registry_banking,
    registry_health,
    required_indicators,
)
from shadow.report import (
    ReportFormat,
    RunConfig,
    build_scatter,
    classify_cross_section,
    cross_section,
    emit_report,
    emit_scatter,
    load_for_run,
    require_periods,
    resolve_registries,
    run_pipeline,
)
from shadow.report.emit import STDOUT

EXIT_DATA_ERROR = 1
EXIT_COMPUTATION_ERROR = 2
EXIT_USAGE = 64
EXIT_IO_ERROR = 74

INDEX_CHOICES = {"rbsp": IndexKind.BANKING_RBSP, "health": IndexKind.ECONOMIC_HEALTH}


class ShadowGroup(click.Group):
    """Command group that reports usage errors with exit code 64."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as ex:
            ex.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as ex:
            ex.exit_code = EXIT_USAGE
            raise


def exit_on_error(func):
    """Translate package errors into the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except OutputError as ex:
            code, message = EXIT_IO_ERROR, str(ex)
        except ConfigurationError as ex:
            code, message = EXIT_USAGE, str(ex)
        except DataError as ex:
            code, message = EXIT_DATA_ERROR, str(ex)
        except ComputationError as ex:
            code, message = EXIT_COMPUTATION_ERROR, str(ex)

        logging.error(f"{ctx.command_path} failed: {message}")
        click.echo(f"ERROR: {message}", err=True)
        ctx.exit(code)

    return wrapper


def parse_periods(ctx, param, value: Optional[str]) -> Tuple[Period, ...]:
    """Parse a comma separated period list (e.g. ``2018,2019``)."""
    if value is None:
        return ()
    try:
        return tuple(parse_period(token) for token in value.split(",") if token)
    except ValueError as ex:
        raise click.BadParameter(str(ex))


def parse_single_period(ctx, param, value: str) -> Period:
    try:
        return parse_period(value)
    except ValueError as ex:
        raise click.BadParameter(str(ex))


def _ids(value: Optional[str]) -> List[str]:
    return [token.strip() for token in value.split(",") if token.strip()]


dataset_option = click.option(
    "--dataset",
    "dataset",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Indicator dataset, CSV or JSON.",
)
registry_option = click.option(
    "--registry",
    "registry",
    multiple=True,
    default=(),
    help=(
        "builtin:banking, builtin:health or a registry JSON file. May be given "
        "more than once."
    ),
)
index_option = click.option(
    "--index",
    "index",
    required=True,
    type=click.Choice(sorted(INDEX_CHOICES)),
    help="Composite index to analyse.",
)
period_option = click.option(
    "--period",
    "period",
    required=True,
    callback=parse_single_period,
    help="Cross-section period, YYYY or YYYY-MM.",
)


@click.group(cls=ShadowGroup)
@click.option("-v", "--verbose", is_flag=True, help="Log debugging detail.")
def main(verbose: bool):
    """Regional banking-services and economic-health indices."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, force=True)


@main.command()
@dataset_option
@registry_option
@click.option(
    "--period",
    "periods",
    required=True,
    callback=parse_periods,
    help="Comma separated periods, e.g. 2018,2019.",
)
@click.option(
    "--out", "out", default=STDOUT, show_default=True, help="Report destination."
)
@click.option(
    "--format",
    "report_format",
    type=click.Choice([f.value for f in ReportFormat]),
    default=ReportFormat.JSON.value,
    show_default=True,
)
@click.option(
    "--weights",
    "weights",
    type=click.Choice([w.value for w in WeightKind]),
    default=WeightKind.POPULATION.value,
    show_default=True,
    help="District aggregation weights.",
)
@click.option(
    "--typology",
    "typology",
    type=click.Path(exists=True, dir_okay=False),
    help="Typology threshold JSON.",
)
@click.option(
    "--scatter",
    "scatter",
    help="Also write a health (x) versus banking (y) SVG for the last period.",
)
@exit_on_error
def compute(
    dataset: str,
    registry: Tuple[str, ...],
    periods: Tuple[Period, ...],
    out: str,
    report_format: str,
    weights: str,
    typology: Optional[str],
    scatter: Optional[str],
):
    """Compute both composite indices and write a report."""
    require_periods(periods)
    config = RunConfig(
        dataset=dataset,
        periods=periods,
        registries=resolve_registries(registry),
        weight_kind=WeightKind(weights),
        typology=load_thresholds(typology) if typology else None,
    )
    bundle = run_pipeline(config)
    emit_report(bundle, ReportFormat(report_format), out)

    if scatter:
        period = periods[-1]
        regions = bundle.regions_for(period)
        spec = build_scatter(
            {r.region_code: r.health_value for r in regions},
            {r.region_code: r.banking_value for r in regions},
            {r.region_code: r.banking_classification for r in regions},
            title=f"Economic health and banking provision, {period}",
            x_label=IndexKind.ECONOMIC_HEALTH.value,
            y_label=IndexKind.BANKING_RBSP.value,
        )
        emit_scatter(spec, scatter)


def _format_statistic(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.6f}"


def echo_summary(summary: DistributionSummary):
    click.echo(f"n: {summary.n}")
    for name in ("mean", "std_dev", "cv", "skewness", "kurtosis", "q1", "median", "q3"):
        click.echo(f"{name}: {_format_statistic(getattr(summary, name))}")


@main.command()
@dataset_option
@registry_option
@index_option
@period_option
@exit_on_error
def stats(dataset: str, registry: Tuple[str, ...], index: str, period: Period):
    """Print distribution statistics of one index cross-section."""
    registries = resolve_registries(registry)
    data = load_for_run(RunConfig(dataset, (period,), registries))
    values = cross_section(data, index, period, registries)
    echo_summary(summarize(list(values.values())))


@main.command()
@dataset_option
@registry_option
@index_option
@period_option
@click.option(
    "--typology",
    "typology",
    type=click.Path(exists=True, dir_okay=False),
    help="Typology threshold JSON.",
)
@exit_on_error
def classify(
    dataset: str,
    registry: Tuple[str, ...],
    index: str,
    period: Period,
    typology: Optional[str],
):
    """Print quartile bands, leader/outsider flags and typologies."""
    registries = resolve_registries(registry)
    thresholds = load_thresholds(typology) if typology else None
    data = load_for_run(RunConfig(dataset, (period,), registries))
    values = cross_section(data, index, period, registries)

    classes = classify_cross_section(data, values, period, thresholds)
    for region in sorted(classes):
        c = classes[region]
        click.echo(
            f"{region:<20} {values[region]:10.4f} {c.quartile_band.value:<10} "
            f"{c.leader_flag.value:<9} {c.typology.value}"
        )


@main.command()
@dataset_option
@registry_option
@click.option("--x", "x_ref", required=True, help="Index or sub-index id (x axis).")
@click.option("--y", "y_ref", required=True, help="Index or sub-index id (y axis).")
@period_option
@click.option("--out", "out", required=True, help="SVG destination.")
@exit_on_error
def plot(
    dataset: str,
    registry: Tuple[str, ...],
    x_ref: str,
    y_ref: str,
    period: Period,
    out: str,
):
    """Write a scatter diagram of two cross-sections.

    Leaders and outsiders are those of the y-axis cross-section.
    """
    registries = resolve_registries(registry)
    data = load_for_run(RunConfig(dataset, (period,), registries))
    x_values = cross_section(data, x_ref, period, registries)
    y_values = cross_section(data, y_ref, period, registries)

    spec = build_scatter(
        x_values,
        y_values,
        classify_cross_section(data, y_values, period),
        title=f"{y_ref} against {x_ref}, {period}",
        x_label=x_ref,
        y_label=y_ref,
    )
    emit_scatter(spec, out)


@main.command()
@dataset_option
@click.option(
    "--required",
    "required",
    help=(
        "Comma separated indicator ids that must be present. Defaults to "
        "those of the built-in registries."
    ),
)
@exit_on_error
def validate(dataset: str, required: Optional[str]):
    """Check a dataset for gaps and unused indicators."""
    registered = required_indicators(registry_banking() + registry_health())
    required_ids = _ids(required) if required else registered

    data = load_dataset(dataset)
    report = validate_dataset(data, required_ids, data.periods, registered)

    for severity, issues in (("error", report.errors), ("warning", report.warnings)):
        for issue in issues:
            location = f"row {issue.row} " if issue.row is not None else ""
            click.echo(f"{severity}: {location}[{issue.rule}] {issue.message}")
    click.echo(
        f"{report.row_count} rows, {len(report.errors)} error(s), "
        f"{len(report.warnings)} warning(s)"
    )

    if not report.accepted:
        click.get_current_context().exit(EXIT_DATA_ERROR)
