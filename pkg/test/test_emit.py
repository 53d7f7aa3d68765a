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

import io
import json
import os
import tempfile
import unittest

from shadow.indices.classification import classify_quartiles
from shadow.indices.composite import (
    CompositeIndexValue,
    DistrictIndexValue,
    IndexKind,
    WeightKind,
)
from shadow.indices.distribution import QUARTILE_CONVENTION, summarize
from shadow.indices.errors import OutputError
from shadow.report.bundle import (
    IndexDistribution,
    PeriodCorrelation,
    RegionReport,
    ReportBundle,
    ReportMetadata,
)
from shadow.report.emit import (
    ReportFormat,
    emit_report,
    persistent_outsiders,
    render_json,
    render_markdown,
)


def make_bundle(cross_sections):
    """Build a bundle from ``{period: {region: (banking, health)}}``."""
    per_region = []
    per_district = []
    distribution = []
    correlation = []
    periods = tuple(sorted(cross_sections))

    for period in periods:
        values = cross_sections[period]
        banking = {r: v[0] for r, v in values.items()}
        health = {r: v[1] for r, v in values.items()}
        banking_classes = classify_quartiles(banking, period)
        health_classes = classify_quartiles(health, period)

        for region in sorted(values):
            per_region.append(
                RegionReport(
                    region_code=region,
                    region_name=f"Region {region}",
                    district_code="D1",
                    period=period,
                    banking=CompositeIndexValue(
                        IndexKind.BANKING_RBSP, region, period, banking[region], ()
                    ),
                    health=CompositeIndexValue(
                        IndexKind.ECONOMIC_HEALTH, region, period, health[region], ()
                    ),
                    banking_classification=banking_classes[region],
                    health_classification=health_classes[region],
                )
            )
        for kind, cross_section in (
            (IndexKind.BANKING_RBSP, banking),
            (IndexKind.ECONOMIC_HEALTH, health),
        ):
            per_district.append(
                DistrictIndexValue(
                    "D1",
                    period,
                    sum(cross_section.values()) / len(cross_section),
                    tuple(sorted(cross_section)),
                    WeightKind.UNWEIGHTED,
                    kind,
                )
            )
            distribution.append(
                IndexDistribution(kind, period, summarize(list(cross_section.values())))
            )
        correlation.append(PeriodCorrelation(period, 0.5))

    metadata = ReportMetadata(
        dataset_path="regions.csv",
        registry_versions=(
            ("banking_rbsp", "builtin:banking@1"),
            ("economic_health", "builtin:health@1"),
        ),
        periods=periods,
        quartile_convention=QUARTILE_CONVENTION,
        weight_kind="unweighted",
    )
    return ReportBundle(
        metadata,
        tuple(per_region),
        tuple(per_district),
        tuple(distribution),
        tuple(correlation),
    )


SIXTEEN = {f"R{i:02d}": (float(i), float(17 - i)) for i in range(1, 17)}


def table_rows(markdown: str, heading: str):
    """Data rows of the first table under ``heading``."""
    lines = markdown.splitlines()
    start = lines.index(heading)
    rows = []
    for line in lines[start + 1:]:
        if line.startswith("#"):
            break
        if line.startswith("| R"):
            rows.append(line)
    return rows


class TestRenderJson(unittest.TestCase):
    def test_round_trip(self):
        bundle = make_bundle({2019: SIXTEEN})

        actual = ReportBundle.from_dict(json.loads(render_json(bundle)))

        self.assertEqual(bundle, actual)

    def test_keys_are_sorted(self):
        text = render_json(make_bundle({2019: SIXTEEN}))

        self.assertLess(text.index('"correlation"'), text.index('"metadata"'))
        self.assertTrue(text.endswith("\n"))


class TestRenderMarkdown(unittest.TestCase):
    def test_group_tables(self):
        markdown = render_markdown(make_bundle({2019: SIXTEEN}))

        outsiders = table_rows(markdown, "#### Outsiders")
        leaders = table_rows(markdown, "#### Leaders")

        self.assertEqual(4, len(outsiders))
        self.assertEqual(4, len(leaders))
        self.assertTrue(leaders[0].startswith("| R16 |"))
        self.assertTrue(outsiders[-1].startswith("| R01 |"))

    def test_sections(self):
        markdown = render_markdown(make_bundle({2019: SIXTEEN}))

        self.assertTrue(markdown.startswith("# Regional index report"))
        self.assertIn("## Banking services provision index (banking_rbsp)", markdown)
        self.assertIn("## Economic health indicator (economic_health)", markdown)
        self.assertIn("### Distribution", markdown)
        self.assertIn("### Federal districts", markdown)
        self.assertIn("| 2019 | 0.5000 |", markdown)
        self.assertNotIn("Outsiders in every period", markdown)

    def test_pipes_in_names_are_escaped(self):
        bundle = make_bundle({2019: SIXTEEN})
        first = bundle.per_region[-1]
        renamed = RegionReport(
            first.region_code,
            "North | South",
            first.district_code,
            first.period,
            first.banking,
            first.health,
            first.banking_classification,
            first.health_classification,
        )
        bundle = ReportBundle(
            bundle.metadata,
            bundle.per_region[:-1] + (renamed,),
            bundle.per_district,
            bundle.distribution,
            bundle.correlation,
        )

        self.assertIn("North \\| South", render_markdown(bundle))

    def test_outsiders_in_every_period(self):
        earlier = dict(SIXTEEN)
        earlier["R01"] = (20.0, 1.0)
        earlier["R05"] = (0.5, 1.0)
        bundle = make_bundle({2018: earlier, 2019: SIXTEEN})

        stable = persistent_outsiders(bundle, IndexKind.BANKING_RBSP)

        self.assertEqual(["R02", "R03", "R04"], stable)
        self.assertIn("### Outsiders in every period", render_markdown(bundle))


class TestEmitReport(unittest.TestCase):
    def test_stream(self):
        buffer = io.StringIO()

        emit_report(make_bundle({2019: SIXTEEN}), ReportFormat.MARKDOWN, buffer)

        self.assertIn("#### Leaders", buffer.getvalue())

    def test_file(self):
        bundle = make_bundle({2019: SIXTEEN})

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "report.json")
            emit_report(bundle, ReportFormat.JSON, path)
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()

        self.assertEqual(render_json(bundle), text)

    def test_unwritable_destination(self):
        bundle = make_bundle({2019: SIXTEEN})

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "missing", "report.json")

            with self.assertRaises(OutputError) as ctx:
                emit_report(bundle, ReportFormat.JSON, path)

        self.assertEqual(path, ctx.exception.path)


if __name__ == "__main__":
    unittest.main()
