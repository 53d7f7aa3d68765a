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
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import IO, Dict, Mapping, Optional, Union

from .errors import ConfigurationError, InsufficientData, MissingFeature
from .distribution import quartile_thresholds
from .ingestion import IndicatorDataset, Period


@unique
class QuartileBand(Enum):
    LOWER = "lower"
    MID_LOWER = "mid_lower"
    MID_UPPER = "mid_upper"
    UPPER = "upper"


@unique
class LeaderFlag(Enum):
    LEADER = "leader"
    OUTSIDER = "outsider"
    NEITHER = "neither"


@unique
class Typology(Enum):
    """Behavioural region types.

    **Values:**

    TYPE_I
        High incomes and a high propensity to save ("profit centres").
    TYPE_II
        High income differentiation, export-oriented specialization and weak
        infrastructure.
    TYPE_III, TYPE_IV
        Reserved. No rule assigns them.
    UNASSIGNED
        No rule fired.
    """

    TYPE_I = "type_I"
    TYPE_II = "type_II"
    TYPE_III = "type_III"
    TYPE_IV = "type_IV"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class RegionClassification:
    region_code: str
    period: Period
    quartile_band: QuartileBand
    leader_flag: LeaderFlag
    typology: Typology = Typology.UNASSIGNED

    def to_dict(self) -> Dict[str, object]:
        return {
            "region_code": self.region_code,
            "period": self.period,
            "quartile_band": self.quartile_band.value,
            "leader_flag": self.leader_flag.value,
            "typology": self.typology.value,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "RegionClassification":
        return RegionClassification(
            region_code=data["region_code"],
            period=data["period"],
            quartile_band=QuartileBand(data["quartile_band"]),
            leader_flag=LeaderFlag(data["leader_flag"]),
            typology=Typology(data["typology"]),
        )


PROFILE_FEATURES = (
    "income_level",
    "savings_propensity",
    "income_differentiation",
    "export_orientation",
    "infrastructure_score",
)

DEFAULT_FEATURE_MAP = {
    "income_level": "household_income",
    "savings_propensity": "savings_rate",
    "income_differentiation": "income_gini",
    "export_orientation": "export_oriented",
    "infrastructure_score": "infrastructure_index",
}


@dataclass(frozen=True)
class RegionProfile:
    """Feature record a region's typology is decided from."""

    income_level: Optional[float] = None
    savings_propensity: Optional[float] = None
    income_differentiation: Optional[float] = None
    export_orientation: Optional[bool] = None
    infrastructure_score: Optional[float] = None


@dataclass(frozen=True)
class TypologyThresholds:
    """Cut-offs of the typology rules. All four are mandatory.

    ``features`` maps each profile feature to the indicator it is read from
    when profiles are built from a dataset.
    """

    t_income: float
    t_save: float
    t_diff: float
    t_infra: float
    features: Mapping[str, str] = field(
        default_factory=lambda: dict(DEFAULT_FEATURE_MAP)
    )

    @staticmethod
    def from_dict(data: Mapping[str, object]) -> "TypologyThresholds":
        """Build thresholds from their JSON form.

        Raises:
            ConfigurationError: a threshold is missing or not a number, or the
                feature map names an unknown feature.
        """
        if not isinstance(data, Mapping):
            raise ConfigurationError("typology thresholds must be a JSON object")

        values = {}
        for name in ("t_income", "t_save", "t_diff", "t_infra"):
            if name not in data:
                raise ConfigurationError(f"typology threshold '{name}' is missing")
            value = data[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(
                    f"typology threshold '{name}' must be a number"
                )
            values[name] = float(value)

        features = dict(DEFAULT_FEATURE_MAP)
        overrides = data.get("features", {})
        unknown = set(overrides) - set(PROFILE_FEATURES)
        if unknown:
            raise ConfigurationError(f"unknown profile features: {sorted(unknown)}")
        features.update(overrides)

        extra = set(data) - {"t_income", "t_save", "t_diff", "t_infra", "features"}
        if extra:
            raise ConfigurationError(f"unknown threshold keys: {sorted(extra)}")

        return TypologyThresholds(features=features, **values)


def load_thresholds(
    source: Union[str, "os.PathLike[str]", IO[str]]
) -> TypologyThresholds:
    """Load :class:`TypologyThresholds` from a JSON file or text stream."""
    try:
        if isinstance(source, (str, os.PathLike)):
            with open(source, "r", encoding="utf-8") as handle:
                payload = json.load(handle)
        else:
            payload = json.load(source)
    except json.JSONDecodeError as ex:
        raise ConfigurationError(f"typology thresholds are not valid JSON: {ex}")

    return TypologyThresholds.from_dict(payload)


def classify_quartiles(
    values: Mapping[str, float], period: Period = 0
) -> Dict[str, RegionClassification]:
    """Place every region of a cross-section into a quartile band.

    Bands are ``lower`` (v <= Q1), ``mid_lower`` (Q1 < v <= median),
    ``mid_upper`` (median < v <= Q3) and ``upper`` (v > Q3). Upper-band
    regions are leaders and lower-band regions outsiders. When all values
    are equal every region lands in ``lower``.

    Raises:
        InsufficientData: fewer than four regions.
    """
    if len(values) < 4:
        raise InsufficientData(
            f"quartile classification needs >= 4 regions, got {len(values)}"
        )

    q1, median, q3 = quartile_thresholds(list(values.values()))
    logging.debug(
        f"Quartile thresholds for {period}: {q1:.6g} / {median:.6g} / {q3:.6g}"
    )

    result = {}
    for region in sorted(values):
        value = values[region]
        if value <= q1:
            band, flag = QuartileBand.LOWER, LeaderFlag.OUTSIDER
        elif value <= median:
            band, flag = QuartileBand.MID_LOWER, LeaderFlag.NEITHER
        elif value <= q3:
            band, flag = QuartileBand.MID_UPPER, LeaderFlag.NEITHER
        else:
            band, flag = QuartileBand.UPPER, LeaderFlag.LEADER
        result[region] = RegionClassification(region, period, band, flag)

    return result


def _require(profile: RegionProfile, name: str):
    value = getattr(profile, name)
    if value is None:
        raise MissingFeature(f"region profile lacks '{name}'")
    return value


def classify_typology(
    profile: RegionProfile, thresholds: TypologyThresholds
) -> Typology:
    """Assign a behavioural type. Rules are tried in order:

    1. type I: income_level >= t_income and savings_propensity >= t_save;
    2. type II: income_differentiation >= t_diff, export-oriented, and
       infrastructure_score < t_infra;
    3. otherwise unassigned.

    Raises:
        MissingFeature: a feature a rule reads is absent.
    """
    income = _require(profile, "income_level")
    savings = _require(profile, "savings_propensity")
    if income >= thresholds.t_income and savings >= thresholds.t_save:
        return Typology.TYPE_I

    differentiation = _require(profile, "income_differentiation")
    export_oriented = _require(profile, "export_orientation")
    infrastructure = _require(profile, "infrastructure_score")
    if (
        differentiation >= thresholds.t_diff
        and export_oriented
        and infrastructure < thresholds.t_infra
    ):
        return Typology.TYPE_II

    return Typology.UNASSIGNED


def build_profile(
    dataset: IndicatorDataset,
    region: str,
    period: Period,
    features: Mapping[str, str] = DEFAULT_FEATURE_MAP,
) -> RegionProfile:
    """Read a region's typology profile from a dataset.

    Absent observations leave the feature unset, so
    :func:`classify_typology` reports them as :class:`MissingFeature`.
    """
    values = {}
    for feature in PROFILE_FEATURES:
        observation = dataset.get(region, features[feature], period)
        if observation is None:
            continue
        if feature == "export_orientation":
            values[feature] = observation.value != 0
        else:
            values[feature] = observation.value
    return RegionProfile(**values)
