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
import unittest
from pathlib import Path

from shadow.indices.errors import (
    DuplicateKeyError,
    NonFiniteValueError,
    ParseError,
    UnknownIndicatorError,
)
from shadow.indices.ingestion import (
    CSV_COLUMNS,
    DataFormat,
    load_dataset,
    parse_period,
    prior_period,
    validate_dataset,
)

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "synthetic_85.csv"

HEADER = ",".join(CSV_COLUMNS)
ROWS = [
    "RU,Russian Federation,RU,population,2019,146000000,persons",
    "RU,Russian Federation,RU,deposits_total,2019,2.6e13,rub",
    "RU-MOW,Moscow,CENTRAL,deposits_total,2019,7.1e12,rub",
]


def csv_bytes(*rows: str) -> bytes:
    return ("\n".join((HEADER,) + rows) + "\n").encode("utf-8")


class TestParsePeriod(unittest.TestCase):
    def test_year(self):
        self.assertEqual(2019, parse_period("2019"))
        self.assertEqual(2019, parse_period(2019))

    def test_month(self):
        self.assertEqual("2019-03", parse_period("2019-03"))

    def test_out_of_range_year_raises(self):
        with self.assertRaises(ValueError):
            parse_period("1989")

    def test_invalid_month_raises(self):
        with self.assertRaises(ValueError):
            parse_period("2019-13")

    def test_garbage_raises(self):
        with self.assertRaises(ValueError):
            parse_period("19")

    def test_prior_period(self):
        self.assertEqual(2018, prior_period(2019))
        self.assertEqual("2018-03", prior_period("2019-03"))


class TestLoadDataset(unittest.TestCase):
    def test_three_rows(self):
        dataset = load_dataset(csv_bytes(*ROWS))

        self.assertEqual(3, len(dataset))
        self.assertEqual(7.1e12, dataset.value("RU-MOW", "deposits_total", 2019))
        self.assertEqual(("RU", "RU-MOW"), dataset.regions)
        self.assertEqual(("RU-MOW",), dataset.subject_regions)
        self.assertEqual("Moscow", dataset.region_name("RU-MOW"))
        self.assertEqual("CENTRAL", dataset.district_code("RU-MOW"))
        self.assertTrue(dataset.has_national)

    def test_stream_source(self):
        dataset = load_dataset(io.BytesIO(csv_bytes(*ROWS)))

        self.assertEqual(3, len(dataset))

    def test_row_order_does_not_matter(self):
        forwards = load_dataset(csv_bytes(*ROWS))
        backwards = load_dataset(csv_bytes(*reversed(ROWS)))

        self.assertEqual(forwards, backwards)

    def test_duplicate_key_cites_both_rows(self):
        duplicate = "RU-MOW,Moscow,CENTRAL,deposits_total,2019,7.2e12,rub"

        with self.assertRaises(DuplicateKeyError) as ctx:
            load_dataset(csv_bytes(*ROWS, duplicate))

        self.assertEqual((4, 5), ctx.exception.rows)
        self.assertEqual(("RU-MOW", "deposits_total", 2019), ctx.exception.key)

    def test_unknown_indicator(self):
        row = "RU-MOW,Moscow,CENTRAL,happiness,2019,1,points"

        with self.assertRaises(UnknownIndicatorError) as ctx:
            load_dataset(csv_bytes(ROWS[0], row))

        self.assertEqual(3, ctx.exception.row)

    def test_comma_decimal_is_rejected_with_targeted_message(self):
        row = 'RU-MOW,Moscow,CENTRAL,deposits_total,2019,"1,5",rub'

        with self.assertRaises(ParseError) as ctx:
            load_dataset(csv_bytes(row))

        self.assertEqual(2, ctx.exception.row)
        self.assertIn("decimal separator", str(ctx.exception))

    def test_non_finite_value_is_a_value_error_with_row(self):
        row = "RU-MOW,Moscow,CENTRAL,deposits_total,2019,nan,rub"

        with self.assertRaises(NonFiniteValueError) as ctx:
            load_dataset(csv_bytes(ROWS[0], row))

        self.assertIsInstance(ctx.exception, ValueError)
        self.assertEqual(3, ctx.exception.row)

    def test_infinite_value(self):
        row = "RU-MOW,Moscow,CENTRAL,deposits_total,2019,inf,rub"

        with self.assertRaises(NonFiniteValueError):
            load_dataset(csv_bytes(row))

    def test_bad_period(self):
        row = "RU-MOW,Moscow,CENTRAL,deposits_total,1850,1,rub"

        with self.assertRaises(ParseError) as ctx:
            load_dataset(csv_bytes(row))

        self.assertEqual(2, ctx.exception.row)

    def test_missing_field(self):
        row = "RU-MOW,,CENTRAL,deposits_total,2019,1,rub"

        with self.assertRaises(ParseError) as ctx:
            load_dataset(csv_bytes(row))

        self.assertIn("region_name", str(ctx.exception))

    def test_blank_lines_keep_physical_row_numbers(self):
        row = "RU,Russia,RU,grp,2019,abc,rub"

        with self.assertRaises(ParseError) as ctx:
            load_dataset(csv_bytes(ROWS[0], "", row))

        self.assertEqual(4, ctx.exception.row)

    def test_blank_lines_are_skipped(self):
        dataset = load_dataset(csv_bytes(ROWS[0], "", ROWS[1], "", ROWS[2]))

        self.assertEqual(3, len(dataset))

    def test_invalid_utf8_is_a_parse_error(self):
        source = csv_bytes(ROWS[0]) + b"RU,\xff\xfe,RU,population,2018,1.0,persons\n"

        with self.assertRaises(ParseError) as ctx:
            load_dataset(source)

        self.assertEqual(3, ctx.exception.row)
        self.assertIn("UTF-8", str(ctx.exception))

    def test_invalid_utf8_json(self):
        with self.assertRaises(ParseError):
            load_dataset(b'[{"region_code": "\xff"}]', DataFormat.JSON)

    def test_wrong_header(self):
        with self.assertRaises(ParseError) as ctx:
            load_dataset(b"region,value\nRU,1\n")

        self.assertEqual(1, ctx.exception.row)

    def test_empty_file(self):
        with self.assertRaises(ParseError):
            load_dataset(b"")

    def test_json_mirrors_csv(self):
        records = [dict(zip(CSV_COLUMNS, row.split(","))) for row in ROWS]
        payload = json.dumps(records).encode("utf-8")

        from_json = load_dataset(payload, DataFormat.JSON)
        from_csv = load_dataset(csv_bytes(*ROWS))

        self.assertEqual(from_csv, from_json)

    def test_json_rows_are_numbered_from_one(self):
        records = [dict(zip(CSV_COLUMNS, row.split(","))) for row in ROWS]
        records[1]["indicator_id"] = "happiness"

        with self.assertRaises(UnknownIndicatorError) as ctx:
            load_dataset(json.dumps(records).encode("utf-8"), DataFormat.JSON)

        self.assertEqual(2, ctx.exception.row)

    def test_missing_observation_names_triple(self):
        dataset = load_dataset(csv_bytes(*ROWS))

        with self.assertRaises(LookupError) as ctx:
            dataset.value("RU-MOW", "population", 2019)

        self.assertIn("(RU-MOW, population, 2019)", str(ctx.exception))


class TestLoadFixture(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dataset = load_dataset(FIXTURE)

    def test_observation_count_matches_line_count(self):
        with open(FIXTURE, "r", encoding="utf-8") as handle:
            lines = [line for line in handle if line.strip()]

        self.assertEqual(len(lines) - 1, len(self.dataset))

    def test_shape(self):
        self.assertEqual(86, len(self.dataset.regions))
        self.assertEqual(85, len(self.dataset.subject_regions))
        self.assertEqual(14, len(self.dataset.indicators))
        self.assertEqual(tuple(range(2014, 2020)), self.dataset.periods)
        self.assertEqual(8, len(self.dataset.districts()))

    def test_loads_are_deterministic(self):
        self.assertEqual(self.dataset, load_dataset(FIXTURE))


class TestValidateDataset(unittest.TestCase):
    def test_complete_coverage(self):
        dataset = load_dataset(csv_bytes(*ROWS[1:]))

        report = validate_dataset(dataset, ["deposits_total"], [2019])

        self.assertTrue(report.accepted)
        self.assertEqual(0, len(report.errors))
        self.assertEqual(2, report.row_count)

    def test_one_missing_triple(self):
        rows = ROWS[1:] + [
            "RU-SPE,St Petersburg,NORTHWEST,deposits_total,2018,1e12,rub",
        ]
        dataset = load_dataset(csv_bytes(*rows))

        report = validate_dataset(dataset, ["deposits_total"], [2019])

        self.assertEqual(1, len(report.errors))
        self.assertIn("(RU-SPE, deposits_total, 2019)", report.errors[0].message)
        self.assertFalse(report.accepted)

    def test_extraneous_indicators_are_warnings(self):
        rows = ROWS[1:] + [
            "RU-MOW,Moscow,CENTRAL,ppi,2019,104.1,index-points",
            "RU-MOW,Moscow,CENTRAL,income_gini,2019,0.41,ratio",
            "RU-MOW,Moscow,CENTRAL,savings_rate,2019,0.12,ratio",
        ]
        dataset = load_dataset(csv_bytes(*rows))

        report = validate_dataset(
            dataset, ["deposits_total"], [2019], registered=["deposits_total"]
        )

        self.assertEqual(0, len(report.errors))
        rules = [w.rule for w in report.warnings]
        self.assertEqual(["unregistered-indicator"] * 3, rules)
        self.assertEqual([5, 4, 6], [w.row for w in report.warnings])

    def test_missing_national_rows_is_a_warning(self):
        dataset = load_dataset(csv_bytes(ROWS[2]))

        report = validate_dataset(dataset, ["deposits_total"], [2019])

        self.assertTrue(report.accepted)
        self.assertIn(
            "national-baseline-absent", [w.rule for w in report.warnings]
        )

    def test_error_count_independent_of_row_order(self):
        rows = ROWS + ["RU-SPE,St Petersburg,NORTHWEST,population,2019,5e6,persons"]
        required = ["deposits_total", "population"]

        forwards = validate_dataset(load_dataset(csv_bytes(*rows)), required, [2019])
        backwards = validate_dataset(
            load_dataset(csv_bytes(*reversed(rows))), required, [2019]
        )

        self.assertEqual(len(forwards.errors), len(backwards.errors))
        self.assertEqual(2, len(forwards.errors))


if __name__ == "__main__":
    unittest.main()
