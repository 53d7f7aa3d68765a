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
import os
import tempfile
import time
import unittest
from pathlib import Path

from shadow.indices.classification import LeaderFlag, Typology, TypologyThresholds
from shadow.indices.composite import IndexKind, WeightKind
from shadow.indices.errors import (
    ComputationStageError,
    ConfigurationError,
    DatasetValidationError,
    NationalBaselineMissing,
)
from shadow.indices.ingestion import load_dataset
from shadow.indices.subindex import dump_registry, registry_banking, registry_health
from shadow.report.emit import render_json
from shadow.report.pipeline import (
    Registry,
    RunConfig,
    cross_section,
    resolve_registries,
    resolve_registry,
    run_pipeline,
)

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "synthetic_85.csv"


def write_filtered_fixture(directory: str, keep) -> Path:
    """Copy the fixture keeping only the data lines ``keep`` accepts."""
    out = Path(directory) / "filtered.csv"
    with open(FIXTURE, "r", encoding="utf-8") as source:
        header, *lines = source.readlines()
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(header)
        handle.writelines(line for line in lines if keep(line))
    return out


class TestRunPipeline(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.bundle = run_pipeline(RunConfig(FIXTURE, (2019,)))

    def test_one_report_per_subject_region(self):
        codes = [r.region_code for r in self.bundle.per_region]

        self.assertEqual(85, len(codes))
        self.assertNotIn("RU", codes)
        self.assertEqual(sorted(codes), codes)

    def test_districts_for_both_indices(self):
        self.assertEqual(16, len(self.bundle.per_district))
        kinds = {d.index_kind for d in self.bundle.per_district}
        self.assertEqual(set(IndexKind), kinds)
        for district in self.bundle.per_district:
            self.assertEqual(WeightKind.POPULATION, district.weight_kind)

    def test_district_values_lie_within_members(self):
        by_region = {r.region_code: r for r in self.bundle.per_region}

        for district in self.bundle.per_district:
            members = [
                by_region[code].composite(district.index_kind).value
                for code in district.member_regions
            ]
            self.assertLessEqual(min(members), district.value)
            self.assertGreaterEqual(max(members), district.value)

    def test_distribution_and_correlation(self):
        summary = self.bundle.distribution_for(IndexKind.BANKING_RBSP, 2019)

        self.assertEqual(85, summary.n)
        self.assertAlmostEqual(0.19, summary.q1, delta=1e-9)
        self.assertAlmostEqual(0.56, summary.q3, delta=1e-9)
        health = self.bundle.distribution_for(IndexKind.ECONOMIC_HEALTH, 2019)
        self.assertIsNotNone(health)
        self.assertEqual(1, len(self.bundle.correlation))
        self.assertGreaterEqual(self.bundle.correlation[0].r_squared, 0.0)
        self.assertLessEqual(self.bundle.correlation[0].r_squared, 1.0)

    def test_groups(self):
        kind = IndexKind.BANKING_RBSP
        leaders = self.bundle.group(kind, 2019, LeaderFlag.LEADER)
        outsiders = self.bundle.group(kind, 2019, LeaderFlag.OUTSIDER)

        self.assertEqual(21, len(leaders))
        self.assertIn("OUTSIDER-LIKE", [r.region_code for r in outsiders])
        values = [r.banking_value for r in leaders]
        self.assertEqual(sorted(values, reverse=True), values)

    def test_metadata(self):
        metadata = self.bundle.metadata

        self.assertEqual((2019,), metadata.periods)
        self.assertEqual("population", metadata.weight_kind)
        self.assertEqual(
            (
                ("banking_rbsp", "builtin:banking@1"),
                ("economic_health", "builtin:health@1"),
            ),
            metadata.registry_versions,
        )

    def test_deterministic(self):
        again = run_pipeline(RunConfig(FIXTURE, (2019,)))

        self.assertEqual(self.bundle, again)

    def test_unweighted_districts(self):
        bundle = run_pipeline(
            RunConfig(FIXTURE, (2019,), weight_kind=WeightKind.UNWEIGHTED)
        )

        self.assertEqual("unweighted", bundle.metadata.weight_kind)
        self.assertEqual(
            {WeightKind.UNWEIGHTED}, {d.weight_kind for d in bundle.per_district}
        )


class TestRunPipelineFailures(unittest.TestCase):
    def test_no_periods(self):
        with self.assertRaises(ConfigurationError):
            run_pipeline(RunConfig(FIXTURE, ()))

    def test_missing_national_rows_name_the_stage(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_filtered_fixture(tmp, lambda line: not line.startswith("RU,"))

            with self.assertRaises(ComputationStageError) as ctx:
                run_pipeline(RunConfig(path, (2019,)))

        self.assertEqual("subindex_engine", ctx.exception.stage)
        self.assertIn("subindex_engine:", str(ctx.exception))
        self.assertIsInstance(ctx.exception.__cause__, NationalBaselineMissing)

    def test_missing_observation_fails_validation(self):
        dropped = "MOSCOW-LIKE,Moscow-Like,"

        def keep(line):
            return not (line.startswith(dropped) and ",deposits_total,2019," in line)

        with tempfile.TemporaryDirectory() as tmp:
            path = write_filtered_fixture(tmp, keep)

            with self.assertRaises(DatasetValidationError) as ctx:
                run_pipeline(RunConfig(path, (2019,)))

        self.assertEqual(1, len(ctx.exception.report.errors))
        self.assertIn("MOSCOW-LIKE", ctx.exception.report.errors[0].message)


class TestRegistries(unittest.TestCase):
    def test_builtins(self):
        registries = resolve_registries([])

        self.assertEqual(8, len(registries[IndexKind.BANKING_RBSP].definitions))
        self.assertEqual(6, len(registries[IndexKind.ECONOMIC_HEALTH].definitions))

    def test_unknown_builtin(self):
        with self.assertRaises(ConfigurationError):
            resolve_registry("builtin:weather")

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            resolve_registry("/nonexistent/registry.json")

    def test_file_registry_replaces_builtin_by_arity(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "health.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(dump_registry(registry_health()))

            registries = resolve_registries([path])

        health = registries[IndexKind.ECONOMIC_HEALTH]
        self.assertRegex(health.version, r"^sha256:[0-9a-f]{16}$")
        self.assertEqual(tuple(registry_health()), health.definitions)
        self.assertEqual(
            "builtin:banking@1", registries[IndexKind.BANKING_RBSP].version
        )

    def test_file_registry_of_wrong_arity(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "short.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(dump_registry(registry_banking()[:5]))

            with self.assertRaises(ConfigurationError) as ctx:
                resolve_registry(path)

        self.assertIn("5 definitions", str(ctx.exception))

    def test_custom_registry_is_recorded(self):
        custom = [d.to_dict() for d in registry_banking()]
        custom[7]["id"] = "I8_custom"

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "banking.json")
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(custom, handle)

            config = RunConfig(FIXTURE, (2019,), resolve_registries([path]))
            bundle = run_pipeline(config)

        versions = dict(bundle.metadata.registry_versions)
        self.assertTrue(versions["banking_rbsp"].startswith("sha256:"))
        self.assertEqual(
            "I8_custom", bundle.per_region[0].banking.subindices[7].definition_id
        )


class TestCrossSection(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dataset = load_dataset(FIXTURE)
        cls.registries = resolve_registries([])

    def test_subindex_reference(self):
        values = cross_section(
            self.dataset, "I8_paid_services_per_capita", 2019, self.registries
        )

        self.assertEqual(85, len(values))
        self.assertAlmostEqual(5.15, values["CRIMEA-LIKE"], delta=1e-9)

    def test_index_aliases_agree(self):
        short = cross_section(self.dataset, "rbsp", 2019, self.registries)
        long = cross_section(self.dataset, "banking_rbsp", 2019, self.registries)

        self.assertEqual(short, long)
        self.assertAlmostEqual(0.15, short["OUTSIDER-LIKE"], delta=1e-9)

    def test_unknown_reference(self):
        with self.assertRaises(ConfigurationError):
            cross_section(self.dataset, "I99_unknown", 2019, self.registries)

    def test_registry_type(self):
        self.assertIsInstance(self.registries[IndexKind.BANKING_RBSP], Registry)


def write_profiled_fixture(directory: str, profiles) -> Path:
    """Copy the fixture adding 2019 typology features for every region.

    ``profiles`` maps a region to its (income, savings, gini, export, infra)
    values; other regions get a profile no rule accepts.
    """
    dataset = load_dataset(FIXTURE)
    indicators = (
        "household_income",
        "savings_rate",
        "income_gini",
        "export_oriented",
        "infrastructure_index",
    )
    out = Path(directory) / "profiled.csv"
    with open(FIXTURE, "r", encoding="utf-8") as source:
        content = source.read()
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(content)
        for region in dataset.subject_regions:
            name = dataset.region_name(region)
            district = dataset.district_code(region)
            values = profiles.get(region, (10.0, 0.1, 0.1, 0, 0.9))
            for indicator, value in zip(indicators, values):
                handle.write(
                    f"{region},{name},{district},{indicator},2019,{value},unit\n"
                )
    return out


TYPOLOGY_PROFILES = {
    "MOSCOW-LIKE": (100.0, 0.5, 0.2, 0, 0.9),
    "KHMAO-LIKE": (10.0, 0.1, 0.5, 1, 0.2),
}


class TestRunPipelineWithTypology(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        path = write_profiled_fixture(cls.tmp.name, TYPOLOGY_PROFILES)
        thresholds = TypologyThresholds(
            t_income=50.0, t_save=0.3, t_diff=0.4, t_infra=0.5
        )
        cls.bundle = run_pipeline(RunConfig(path, (2019,), typology=thresholds))

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_typologies_in_bundle(self):
        for region in self.bundle.per_region:
            expected = {
                "MOSCOW-LIKE": Typology.TYPE_I,
                "KHMAO-LIKE": Typology.TYPE_II,
            }.get(region.region_code, Typology.UNASSIGNED)

            self.assertEqual(expected, region.banking_classification.typology)
            self.assertEqual(expected, region.health_classification.typology)

    def test_typologies_in_json_report(self):
        report = json.loads(render_json(self.bundle))

        typologies = {
            r["region_code"]: r["banking_classification"]["typology"]
            for r in report["per_region"]
        }
        self.assertEqual("type_I", typologies["MOSCOW-LIKE"])
        self.assertEqual("type_II", typologies["KHMAO-LIKE"])
        self.assertEqual("unassigned", typologies["OUTSIDER-LIKE"])

    def test_quartile_bands_unchanged_by_typology(self):
        plain = run_pipeline(RunConfig(FIXTURE, (2019,)))

        for with_typology, without in zip(self.bundle.per_region, plain.per_region):
            self.assertEqual(
                without.banking_classification.quartile_band,
                with_typology.banking_classification.quartile_band,
            )


class TestPipelineRuntime(unittest.TestCase):
    def test_five_periods_within_a_second(self):
        config = RunConfig(FIXTURE, (2015, 2016, 2017, 2018, 2019))

        start = time.perf_counter()
        bundle = run_pipeline(config)
        elapsed = time.perf_counter() - start

        self.assertEqual(85 * 5, len(bundle.per_region))
        self.assertLess(elapsed, 1.0)


if __name__ == "__main__":
    unittest.main()
