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

"""Calibrated synthetic dataset of 85 regions plus the national row-set.

Every value is random but seeded, except a handful of checkpoints that mirror
published figures: paid-services sub-indices of 5.15, 2.86, 0.45, 0.56, 0.25
and 0.17, a savings sub-index of 1.41, and a 2019 banking-index cross-section
whose lower and upper quartiles are exactly 0.19 and 0.56.
"""

import csv
import logging
import os
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..indices.ingestion import CSV_COLUMNS, NATIONAL_REGION_CODE

FIXTURE_PATH = Path(__file__).resolve().parents[2] / "fixtures" / "synthetic_85.csv"
SEED_ENVIRONMENT_VARIABLE = "SHADOW_SEED"

PERIODS = tuple(range(2014, 2020))
CALIBRATED_PERIOD = 2019

DISTRICTS = (
    "CENTRAL",
    "NORTHWEST",
    "SOUTH",
    "NORTH-CAUCASUS",
    "VOLGA",
    "URAL",
    "SIBERIA",
    "FAR-EAST",
)

# Paid services per capita relative to the national level.
PAID_SERVICES_CHECKPOINTS = {
    "CRIMEA-LIKE": 5.15,
    "SEVASTOPOL-LIKE": 2.86,
    "SAKHALIN-LIKE": 0.45,
    "CHUKOTKA-LIKE": 0.56,
    "KHMAO-LIKE": 0.25,
    "YANAO-LIKE": 0.17,
}
SAVINGS_CHECKPOINTS = {"MOSCOW-LIKE": 1.41}
BANKING_CHECKPOINTS = {"OUTSIDER-LIKE": 0.15, "Q1-ANCHOR": 0.19, "Q3-ANCHOR": 0.56}

REGION_COUNT = 85

UNITS = {
    "population": "persons",
    "grp": "rub",
    "credit_institutions_count": "units",
    "bank_assets": "rub",
    "bank_capital": "rub",
    "loans_individuals": "rub",
    "loans_legal_entities": "rub",
    "deposits_total": "rub",
    "paid_services_volume": "rub",
    "construction_volume_index": "index-points",
    "fixed_capital_investment": "rub",
    "retail_turnover": "rub",
    "unemployment_rate": "percent",
    "cpi": "index-points",
}

_CPI = (111.4, 112.9, 105.4, 102.5, 104.3, 103.0)


def region_codes() -> List[str]:
    """Subject region codes in fixture order."""
    named = (
        list(PAID_SERVICES_CHECKPOINTS)
        + list(SAVINGS_CHECKPOINTS)
        + list(BANKING_CHECKPOINTS)
    )
    synthetic = [f"SYN-{i:02d}" for i in range(1, REGION_COUNT - len(named) + 1)]
    return named + synthetic


def national_values(step: int) -> Dict[str, float]:
    """National ("RU") raw values ``step`` years after 2014."""
    return {
        "population": 146.0e6,
        "grp": 7.0e13 * 1.06**step,
        "credit_institutions_count": 900.0 - 40.0 * step,
        "bank_assets": 8.0e13 * 1.08**step,
        "bank_capital": 9.0e12 * 1.05**step,
        "loans_individuals": 1.1e13 * 1.10**step,
        "loans_legal_entities": 3.0e13 * 1.06**step,
        "deposits_total": 2.6e13 * 1.07**step,
        "paid_services_volume": 8.5e12 * 1.04**step,
        "construction_volume_index": 100.0 + step,
        "fixed_capital_investment": 1.4e13 * 1.05**step,
        "retail_turnover": 2.7e13 * 1.04**step,
        "unemployment_rate": 5.5 - 0.1 * step,
        "cpi": _CPI[step],
    }


def _calibrated_targets(rng: np.random.Generator, codes: List[str]) -> Dict[str, float]:
    """Banking-index targets for the calibrated period.

    With 85 regions the type-7 quartiles sit exactly on the 22nd and 64th
    order statistics, so 21 regions go below 0.19, 41 between the anchors and
    21 above 0.56.
    """
    others = [c for c in codes if c not in BANKING_CHECKPOINTS]
    others = [others[i] for i in rng.permutation(len(others))]

    targets = dict(BANKING_CHECKPOINTS)
    low, middle, high = others[:20], others[20:61], others[61:]
    for code in low:
        targets[code] = float(rng.uniform(0.05, 0.185))
    for code in middle:
        targets[code] = float(rng.uniform(0.2, 0.55))
    for code in high:
        targets[code] = float(rng.uniform(0.57, 1.9))
    return targets


def _region_rows(
    rng: np.random.Generator,
    code: str,
    district: str,
    calibrated_target: float,
) -> List[List[object]]:
    population_base = float(rng.uniform(0.3e6, 5.0e6))
    grp_per_capita = float(rng.uniform(0.5, 2.5))
    rows = []

    for step, period in enumerate(PERIODS):
        ru = national_values(step)
        population = population_base * (1.0 + 0.005 * step)
        share = population / ru["population"]
        grp = grp_per_capita * share * ru["grp"]

        if period == CALIBRATED_PERIOD:
            target = calibrated_target
        else:
            target = float(rng.uniform(0.1, 1.8))

        i1 = target * float(rng.uniform(0.6, 1.6))
        i2 = i1 / grp_per_capita
        i5 = target * float(rng.uniform(0.6, 1.6))
        i7 = SAVINGS_CHECKPOINTS.get(code, target * float(rng.uniform(0.6, 1.6)))
        i8 = PAID_SERVICES_CHECKPOINTS.get(code, float(rng.uniform(0.6, 2.4)))

        base = (target**8 / (i1 * i2 * i5 * i7 * i8)) ** (1.0 / 3.0)
        a, b = float(rng.uniform(0.7, 1.4)), float(rng.uniform(0.7, 1.4))
        i3, i4, i6 = base * a, base * b, base / (a * b)

        values = {
            "population": population,
            "grp": grp,
            "credit_institutions_count": i1
            * ru["credit_institutions_count"]
            / ru["population"]
            * population,
            "bank_assets": i3 * ru["bank_assets"] / ru["grp"] * grp,
            "bank_capital": i4 * ru["bank_capital"] / ru["grp"] * grp,
            "loans_individuals": i5
            * ru["loans_individuals"]
            / ru["population"]
            * population,
            "loans_legal_entities": i6 * ru["loans_legal_entities"] / ru["grp"] * grp,
            "deposits_total": i7 * ru["deposits_total"] / ru["population"] * population,
            "paid_services_volume": i8
            * ru["paid_services_volume"]
            / ru["population"]
            * population,
            "construction_volume_index": ru["construction_volume_index"]
            * float(rng.uniform(0.85, 1.2)),
            "fixed_capital_investment": ru["fixed_capital_investment"]
            * share
            * float(rng.uniform(0.5, 2.0)),
            "retail_turnover": ru["retail_turnover"]
            * share
            * float(rng.uniform(0.7, 1.4)),
            "unemployment_rate": float(rng.uniform(2.5, 12.0)),
            "cpi": ru["cpi"] + float(rng.uniform(-2.0, 2.0)),
        }
        for indicator, value in values.items():
            rows.append(
                [
                    code,
                    code.title(),
                    district,
                    indicator,
                    period,
                    repr(value),
                    UNITS[indicator],
                ]
            )

    return rows


def generate_fixture(seed: int, out: Optional[os.PathLike] = None) -> Path:
    """Write a calibrated fixture generated from ``seed``.

    Args:
        seed: Seed of the random generator.
        out: Destination path. Defaults to the shipped fixture path.

    Returns:
        The path written.
    """
    out = Path(out) if out is not None else FIXTURE_PATH
    rng = np.random.default_rng(seed)
    codes = region_codes()
    targets = _calibrated_targets(rng, codes)

    rows = []
    for step, period in enumerate(PERIODS):
        for indicator, value in national_values(step).items():
            rows.append(
                [
                    NATIONAL_REGION_CODE,
                    "Russian Federation",
                    NATIONAL_REGION_CODE,
                    indicator,
                    period,
                    repr(value),
                    UNITS[indicator],
                ]
            )
    for i, code in enumerate(codes):
        district = DISTRICTS[i % len(DISTRICTS)]
        rows.extend(_region_rows(rng, code, district, targets[code]))

    logging.info(f"Writing {len(rows)} fixture rows (seed {seed}) to '{out}'...")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
    return out


def fixture_path(workdir: Optional[os.PathLike] = None) -> Path:
    """Get the fixture to use.

    When ``SHADOW_SEED`` is set, a fixture is regenerated from that seed into
    ``workdir`` (which must then be given); otherwise the shipped file is
    returned as-is.
    """
    seed = os.environ.get(SEED_ENVIRONMENT_VARIABLE)
    if not seed:
        return FIXTURE_PATH
    if workdir is None:
        raise ValueError(f"{SEED_ENVIRONMENT_VARIABLE} is set but no workdir given")
    return generate_fixture(int(seed), Path(workdir) / "synthetic_85.csv")
