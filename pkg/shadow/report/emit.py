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

import json
import logging
import os
import sys
from enum import Enum, unique
from typing import IO, List, Optional, Sequence, Union

from ..indices.classification import LeaderFlag
from ..indices.composite import IndexKind
from ..indices.errors import OutputError
from .bundle import RegionReport, ReportBundle

Destination = Union[str, "os.PathLike[str]", IO[str]]

# Path meaning "write to standard output".
STDOUT = "-"

INDEX_TITLES = {
    IndexKind.BANKING_RBSP: "Banking services provision index",
    IndexKind.ECONOMIC_HEALTH: "Economic health indicator",
}


@unique
class ReportFormat(Enum):
    JSON = "json"
    MARKDOWN = "markdown"


def write_text(text: str, out: Destination):
    """Write ``text`` to a path, ``-`` (stdout) or an open text stream.

    Raises:
        OutputError: the destination could not be written.
    """
    if isinstance(out, (str, os.PathLike)):
        if os.fspath(out) == STDOUT:
            sys.stdout.write(text)
            return
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
        except OSError as ex:
            raise OutputError(os.fspath(out), ex) from ex
        logging.info(f"Wrote {len(text)} characters to '{os.fspath(out)}'.")
    else:
        out.write(text)


def render_json(bundle: ReportBundle) -> str:
    """Alphabetically-keyed JSON that :meth:`ReportBundle.from_dict` reads back."""
    return json.dumps(bundle.to_dict(), sort_keys=True, indent=2) + "\n"


def _number(value: Optional[float], places: int = 4) -> str:
    return "n/a" if value is None else f"{value:.{places}f}"


def _cell(text: str) -> str:
    return str(text).replace("|", "\\|")


def _group_table(
    lines: List[str], kind: IndexKind, regions: Sequence[RegionReport]
):
    if not regions:
        lines.append("_None._")
        lines.append("")
        return
    lines.append("| Region | Name | District | Value |")
    lines.append("|--------|------|----------|-------|")
    for r in regions:
        value = _number(r.composite(kind).value)
        lines.append(
            f"| {_cell(r.region_code)} | {_cell(r.region_name)} "
            f"| {_cell(r.district_code)} | {value} |"
        )
    lines.append("")


def persistent_outsiders(bundle: ReportBundle, kind: IndexKind) -> List[str]:
    """Regions in the outsider group of ``kind`` in every reported period."""
    periods = bundle.metadata.periods
    if not periods:
        return []

    groups = [
        {r.region_code for r in bundle.group(kind, p, LeaderFlag.OUTSIDER)}
        for p in periods
    ]
    return sorted(set.intersection(*groups))


def _index_section(lines: List[str], bundle: ReportBundle, kind: IndexKind):
    lines.append(f"## {INDEX_TITLES[kind]} ({kind.value})")
    lines.append("")

    for period in bundle.metadata.periods:
        lines.append(f"### {period}")
        lines.append("")
        lines.append("#### Leaders")
        lines.append("")
        _group_table(lines, kind, bundle.group(kind, period, LeaderFlag.LEADER))
        lines.append("#### Outsiders")
        lines.append("")
        _group_table(lines, kind, bundle.group(kind, period, LeaderFlag.OUTSIDER))

    if len(bundle.metadata.periods) > 1:
        stable = persistent_outsiders(bundle, kind)
        lines.append("### Outsiders in every period")
        lines.append("")
        lines.append(", ".join(stable) if stable else "_None._")
        lines.append("")

    lines.append("### Distribution")
    lines.append("")
    lines.append(
        "| Period | n | Mean | Std. dev. | CV | Skewness | Kurtosis "
        "| Q1 | Median | Q3 |"
    )
    lines.append(
        "|--------|---|------|-----------|----|----------|----------"
        "|----|--------|----|"
    )
    for period in bundle.metadata.periods:
        s = bundle.distribution_for(kind, period)
        if s is None:
            continue
        lines.append(
            f"| {period} | {s.n} | {_number(s.mean)} | {_number(s.std_dev)} "
            f"| {_number(s.cv, 3)} | {_number(s.skewness)} "
            f"| {_number(s.kurtosis)} | {_number(s.q1)} | {_number(s.median)} "
            f"| {_number(s.q3)} |"
        )
    lines.append("")

    _district_table(lines, bundle, kind)


def _district_table(lines: List[str], bundle: ReportBundle, kind: IndexKind):
    periods = bundle.metadata.periods
    values = {
        (d.district_code, d.period): d.value
        for d in bundle.per_district
        if d.index_kind == kind
    }
    districts = sorted({district for district, _ in values})

    lines.append("### Federal districts")
    lines.append("")
    lines.append("| District | " + " | ".join(str(p) for p in periods) + " |")
    lines.append("|----------|" + "|".join("------" for _ in periods) + "|")
    for district in districts:
        cells = " | ".join(_number(values.get((district, p))) for p in periods)
        lines.append(f"| {_cell(district)} | {cells} |")
    lines.append("")


def render_markdown(bundle: ReportBundle) -> str:
    """Human-readable report: leader and outsider listings per index and
    period, distribution diagnostics, district dynamics and correlation."""
    metadata = bundle.metadata
    registries = ", ".join(f"{k}={v}" for k, v in metadata.registry_versions)

    lines = ["# Regional index report", ""]
    lines.append(f"- **Dataset:** {metadata.dataset_path}")
    lines.append(f"- **Registries:** {registries}")
    lines.append(f"- **Periods:** {', '.join(str(p) for p in metadata.periods)}")
    lines.append(f"- **Quartile convention:** {metadata.quartile_convention}")
    lines.append(f"- **District weights:** {metadata.weight_kind}")
    lines.append("")

    for kind in IndexKind:
        _index_section(lines, bundle, kind)

    lines.append("## Health versus banking")
    lines.append("")
    lines.append("| Period | R² |")
    lines.append("|--------|----|")
    for entry in bundle.correlation:
        lines.append(f"| {entry.period} | {_number(entry.r_squared)} |")
    lines.append("")

    return "\n".join(lines)


def emit_report(
    bundle: ReportBundle,
    format: ReportFormat,
    out: Destination,
):
    """Write a report bundle as JSON or Markdown.

    Args:
        bundle: The bundle to write.
        format: Output format.
        out: Destination path, ``-`` for stdout, or an open text stream.

    Raises:
        OutputError: the destination could not be written.
    """
    if format == ReportFormat.JSON:
        text = render_json(bundle)
    else:
        text = render_markdown(bundle)
    write_text(text, out)
