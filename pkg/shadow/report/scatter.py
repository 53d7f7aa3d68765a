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

"""Self-contained SVG scatter diagrams of regional cross-sections.

The output is built element by element so identical specs always give
identical bytes.
"""

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum, unique
from typing import List, Mapping, Sequence, Tuple

from ..indices.classification import LeaderFlag, RegionClassification
from ..indices.errors import DomainError
from .emit import Destination, write_text

SVG_NAMESPACE = "http://www.w3.org/2000/svg"

WIDTH = 640
HEIGHT = 480
MARGIN_LEFT = 72
MARGIN_RIGHT = 24
MARGIN_TOP = 48
MARGIN_BOTTOM = 64
POINT_RADIUS = 4

STYLE = (
    "text { font-family: sans-serif; font-size: 12px; fill: #222; } "
    ".title { font-size: 16px; } "
    ".axis { stroke: #222; stroke-width: 1; } "
    ".grid { stroke: #ddd; stroke-width: 1; } "
    ".point { fill: #8c8c8c; fill-opacity: 0.8; } "
    ".point.leader { fill: #1a9641; } "
    ".point.outsider { fill: #d7191c; }"
)

_STEPS = (1.0, 2.0, 2.5, 5.0, 10.0)
_MIDDLE = {"text-anchor": "middle"}
_END = {"text-anchor": "end"}


@unique
class Highlight(Enum):
    LEADER = "leader"
    OUTSIDER = "outsider"
    NONE = "none"


@dataclass(frozen=True)
class ScatterPoint:
    label: str
    x: float
    y: float
    highlight: Highlight = Highlight.NONE


@dataclass(frozen=True)
class ScatterSpec:
    """A titled scatter diagram.

    Raises:
        DomainError: there are no points, or a coordinate is not finite.
    """

    title: str
    x_label: str
    y_label: str
    points: Tuple[ScatterPoint, ...]

    def __post_init__(self):
        if not self.points:
            raise DomainError("a scatter diagram needs at least one point")
        for point in self.points:
            if not (math.isfinite(point.x) and math.isfinite(point.y)):
                raise DomainError(
                    f"point '{point.label}' has a non-finite coordinate"
                )


def build_scatter(
    x_values: Mapping[str, float],
    y_values: Mapping[str, float],
    classes: Mapping[str, RegionClassification],
    title: str,
    x_label: str,
    y_label: str,
) -> ScatterSpec:
    """Pair two cross-sections into a scatter spec.

    Regions present in both mappings become points, ordered by region code.
    Highlights follow ``classes``: leaders and outsiders keep their flag,
    everything else is plain.
    """
    points = []
    for region in sorted(set(x_values) & set(y_values)):
        classification = classes.get(region)
        highlight = Highlight.NONE
        if classification is not None:
            if classification.leader_flag == LeaderFlag.LEADER:
                highlight = Highlight.LEADER
            elif classification.leader_flag == LeaderFlag.OUTSIDER:
                highlight = Highlight.OUTSIDER
        points.append(
            ScatterPoint(region, x_values[region], y_values[region], highlight)
        )
    return ScatterSpec(title, x_label, y_label, tuple(points))


def nice_ticks(low: float, high: float, target: int = 5) -> List[float]:
    """Get round tick values (1, 2, 2.5 or 5 times a power of ten) whose
    range covers ``[low, high]``."""
    if low == high:
        pad = abs(low) * 0.5 if low != 0 else 1.0
        low, high = low - pad, high + pad

    raw = (high - low) / target
    magnitude = 10.0 ** math.floor(math.log10(raw))
    step = next(s * magnitude for s in _STEPS if s * magnitude >= raw)

    first = math.floor(low / step)
    last = math.ceil(high / step)
    digits = max(0, 2 - math.floor(math.log10(step)))
    return [round(i * step, digits) for i in range(first, last + 1)]


def _tick_labels(ticks: Sequence[float]) -> List[str]:
    """Format ticks with enough significant digits to tell them apart."""
    if len(ticks) < 2:
        return [f"{tick:g}" for tick in ticks]
    step = abs(ticks[1] - ticks[0])
    largest = max(abs(tick) for tick in ticks)
    needed = 6
    if step > 0 and largest > 0:
        spread = math.floor(math.log10(largest)) - math.floor(math.log10(step))
        needed = max(needed, spread + 2)
    return [f"{tick:.{needed}g}" for tick in ticks]


def _coordinate(value: float) -> str:
    return f"{value:.2f}"


def _scale(ticks: Sequence[float], start: float, length: float):
    low, high = ticks[0], ticks[-1]
    if high == low:
        return lambda v: start + length / 2
    return lambda v: start + (v - low) / (high - low) * length


def _line(parent: ET.Element, css: str, x1: float, y1: float, x2: float, y2: float):
    ET.SubElement(
        parent,
        "line",
        {
            "class": css,
            "x1": _coordinate(x1),
            "y1": _coordinate(y1),
            "x2": _coordinate(x2),
            "y2": _coordinate(y2),
        },
    )


def _text(parent: ET.Element, text: str, x: float, y: float, **attributes: str):
    element = ET.SubElement(
        parent, "text", {"x": _coordinate(x), "y": _coordinate(y), **attributes}
    )
    element.text = text
    return element


def render_svg(spec: ScatterSpec) -> str:
    plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_height = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    left, right = MARGIN_LEFT, MARGIN_LEFT + plot_width
    top, bottom = MARGIN_TOP, MARGIN_TOP + plot_height

    x_ticks = nice_ticks(min(p.x for p in spec.points), max(p.x for p in spec.points))
    y_ticks = nice_ticks(min(p.y for p in spec.points), max(p.y for p in spec.points))
    to_x = _scale(x_ticks, left, plot_width)
    y_up = _scale(y_ticks, 0, plot_height)

    def to_y(v: float) -> float:
        return bottom - y_up(v)

    svg = ET.Element(
        "svg",
        {
            "xmlns": SVG_NAMESPACE,
            "width": str(WIDTH),
            "height": str(HEIGHT),
            "viewBox": f"0 0 {WIDTH} {HEIGHT}",
        },
    )
    ET.SubElement(svg, "style").text = STYLE
    _text(svg, spec.title, WIDTH / 2, top / 2, **{"class": "title"}, **_MIDDLE)

    for tick, label in zip(x_ticks, _tick_labels(x_ticks)):
        _line(svg, "grid", to_x(tick), top, to_x(tick), bottom)
        _text(svg, label, to_x(tick), bottom + 18, **_MIDDLE)
    for tick, label in zip(y_ticks, _tick_labels(y_ticks)):
        _line(svg, "grid", left, to_y(tick), right, to_y(tick))
        _text(svg, label, left - 8, to_y(tick) + 4, **_END)

    _line(svg, "axis", left, bottom, right, bottom)
    _line(svg, "axis", left, top, left, bottom)

    _text(svg, spec.x_label, (left + right) / 2, HEIGHT - 16, **_MIDDLE)
    centre = _coordinate((top + bottom) / 2)
    _text(
        svg,
        spec.y_label,
        18,
        (top + bottom) / 2,
        transform=f"rotate(-90 18.00 {centre})",
        **_MIDDLE,
    )

    for point in spec.points:
        css = "point"
        if point.highlight != Highlight.NONE:
            css = f"point {point.highlight.value}"
        circle = ET.SubElement(
            svg,
            "circle",
            {
                "class": css,
                "cx": _coordinate(to_x(point.x)),
                "cy": _coordinate(to_y(point.y)),
                "r": str(POINT_RADIUS),
            },
        )
        ET.SubElement(circle, "title").text = (
            f"{point.label} ({point.x:.4g}, {point.y:.4g})"
        )

    ET.indent(svg)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        + ET.tostring(svg, encoding="unicode")
        + "\n"
    )


def emit_scatter(spec: ScatterSpec, out: Destination):
    """Write ``spec`` as an SVG document.

    Raises:
        OutputError: the destination could not be written.
    """
    logging.info(f"Rendering scatter '{spec.title}' with {len(spec.points)} points.")
    write_text(render_svg(spec), out)
