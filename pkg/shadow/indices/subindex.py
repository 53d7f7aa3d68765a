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
import math
import os
from dataclasses import dataclass
from enum import Enum, unique
from typing import IO, Dict, Iterable, List, Optional, Sequence, Union

from .errors import (
    ConfigurationError,
    DivisionByZero,
    DomainError,
    NationalBaselineMissing,
    NonPositiveValue,
)
from .ingestion import INDICATOR_VOCABULARY, IndicatorDataset, Period, prior_period

BUILTIN_REGISTRY_VERSION = 1


@unique
class Denominator(Enum):
    """What a sub-index numerator is divided by before normalization."""

    POPULATION = "population"
    GRP = "grp"
    NONE = "none"


@unique
class Transform(Enum):
    """How a raw series is read for a period.

    **Values:**

    LEVEL
        The raw value for the period.
    YOY_GROWTH
        The raw value divided by the value one year earlier.
    """

    LEVEL = "level"
    YOY_GROWTH = "yoy_growth"


@unique
class Direction(Enum):
    """Whether a higher sub-index value is better (``BENEFIT``) or worse
    (``COST``). Cost values are inverted by reciprocal."""

    BENEFIT = "benefit"
    COST = "cost"


@dataclass(frozen=True)
class SubIndexDefinition:
    """Declarative recipe for one sub-index.

    The sub-index value for a region and period is::

        dir(norm(tr(numerator) / tr(denominator)))

    where ``tr`` applies ``transform``, ``norm`` divides by the same quantity
    computed for the national row-set, and ``dir`` inverts cost indicators.
    """

    id: str
    numerator: str
    denominator: Denominator = Denominator.NONE
    transform: Transform = Transform.LEVEL
    direction: Direction = Direction.BENEFIT
    normalize_national: bool = True

    @property
    def denominator_indicator(self) -> Optional[str]:
        if self.denominator == Denominator.NONE:
            return None
        return self.denominator.value

    @property
    def indicators(self) -> List[str]:
        """Indicator ids this definition reads."""
        if self.denominator_indicator is None:
            return [self.numerator]
        return [self.numerator, self.denominator_indicator]

    def to_dict(self) -> Dict[str, object]:
        return {
            "id": self.id,
            "numerator": self.numerator,
            "denominator": self.denominator.value,
            "transform": self.transform.value,
            "direction": self.direction.value,
            "normalize_national": self.normalize_national,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "SubIndexDefinition":
        """Build a definition from its JSON form.

        Raises:
            ConfigurationError: a key is missing or holds an invalid value.
        """
        expected = {
            "id",
            "numerator",
            "denominator",
            "transform",
            "direction",
            "normalize_national",
        }
        if not isinstance(data, dict) or set(data) != expected:
            raise ConfigurationError(
                f"registry entry must have exactly the keys {sorted(expected)}"
            )

        if data["numerator"] not in INDICATOR_VOCABULARY:
            raise ConfigurationError(
                f"registry entry '{data['id']}' uses unknown indicator "
                f"'{data['numerator']}'"
            )
        if not isinstance(data["normalize_national"], bool):
            raise ConfigurationError(
                f"registry entry '{data['id']}': normalize_national must be boolean"
            )

        try:
            return SubIndexDefinition(
                id=str(data["id"]),
                numerator=str(data["numerator"]),
                denominator=Denominator(data["denominator"]),
                transform=Transform(data["transform"]),
                direction=Direction(data["direction"]),
                normalize_national=data["normalize_national"],
            )
        except ValueError as ex:
            raise ConfigurationError(f"registry entry '{data['id']}': {ex}") from ex


@dataclass(frozen=True)
class SubIndexValue:
    """A computed sub-index.

    ``raw_regional`` and ``raw_national`` are the transformed ratios before
    normalization, kept for audit. ``raw_national`` is 1 when the definition
    is not normalized.
    """

    definition_id: str
    region_code: str
    period: Period
    value: float
    raw_regional: float
    raw_national: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "definition_id": self.definition_id,
            "region_code": self.region_code,
            "period": self.period,
            "value": self.value,
            "raw_regional": self.raw_regional,
            "raw_national": self.raw_national,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "SubIndexValue":
        return SubIndexValue(**data)


def _check_finite(*values: float):
    for value in values:
        if not math.isfinite(value):
            raise DomainError(f"input {value!r} is not finite")


def normalize_to_national(regional: float, national: float) -> float:
    """Express a regional value relative to the national value.

    Raises:
        DomainError: an input is not finite.
        DivisionByZero: ``national`` is zero.
    """
    _check_finite(regional, national)
    if national == 0:
        raise DivisionByZero("national value is zero")
    return regional / national


def compute_yoy_growth(current: float, previous: float) -> float:
    """Year-over-year growth as a ratio (1.29 means "129%").

    Raises:
        DomainError: an input is not finite.
        DivisionByZero: ``previous`` is zero.
    """
    _check_finite(current, previous)
    if previous == 0:
        raise DivisionByZero("previous-period value is zero")
    return current / previous


def apply_direction(value: float, direction: Direction) -> float:
    """Leave benefit values unchanged; replace cost values by 1/value."""
    if direction == Direction.COST:
        if value == 0:
            raise DivisionByZero("cannot invert a zero cost value")
        return 1.0 / value
    return value


def _transformed(
    dataset: IndicatorDataset,
    region: str,
    indicator: str,
    period: Period,
    transform: Transform,
) -> float:
    current = dataset.value(region, indicator, period)
    if transform == Transform.LEVEL:
        return current

    previous = dataset.value(region, indicator, prior_period(period))
    try:
        return compute_yoy_growth(current, previous)
    except DivisionByZero:
        raise DivisionByZero(
            f"({region}, {indicator}, {prior_period(period)}) is zero"
        )


def _raw_ratio(
    definition: SubIndexDefinition,
    dataset: IndicatorDataset,
    region: str,
    period: Period,
) -> float:
    numerator = _transformed(
        dataset, region, definition.numerator, period, definition.transform
    )
    if definition.denominator_indicator is None:
        return numerator

    denominator = _transformed(
        dataset,
        region,
        definition.denominator_indicator,
        period,
        definition.transform,
    )
    if denominator == 0:
        raise DivisionByZero(
            f"'{definition.id}': denominator "
            f"{definition.denominator_indicator} is zero for ({region}, {period})"
        )
    return numerator / denominator


def compute_subindex(
    definition: SubIndexDefinition,
    dataset: IndicatorDataset,
    region: str,
    period: Period,
) -> SubIndexValue:
    """Compute one sub-index value for a region and period.

    Raises:
        MissingObservation: a required observation is absent (the error names
            the exact triple).
        NationalBaselineMissing: normalization is requested but the dataset
            has no national rows.
        DivisionByZero: a denominator or the national value is zero.
        NonPositiveValue: the normalized value is zero or negative.
    """
    regional = _raw_ratio(definition, dataset, region, period)

    if definition.normalize_national:
        national_code = dataset.national_region_code
        if not dataset.has_national:
            raise NationalBaselineMissing(national_code, definition.numerator, period)
        national = _raw_ratio(definition, dataset, national_code, period)
        try:
            normalized = normalize_to_national(regional, national)
        except DivisionByZero:
            raise DivisionByZero(
                f"'{definition.id}': national value is zero for {period}"
            )
    else:
        national = 1.0
        normalized = regional

    if normalized <= 0:
        raise NonPositiveValue(definition.id, normalized)

    return SubIndexValue(
        definition_id=definition.id,
        region_code=region,
        period=period,
        value=apply_direction(normalized, definition.direction),
        raw_regional=regional,
        raw_national=national,
    )


def compute_all_subindices(
    registry: Sequence[SubIndexDefinition],
    dataset: IndicatorDataset,
    period: Period,
    regions: Optional[Iterable[str]] = None,
) -> Dict[str, List[SubIndexValue]]:
    """Compute every registry definition for every region of a cross-section.

    Args:
        registry: Definitions to evaluate, in output order.
        dataset: Source data.
        period: The cross-section period.
        regions: Regions to evaluate. Defaults to the dataset's subject
            regions (the national row-set excluded).

    Returns:
        A dict of region code to the list of sub-index values, in registry
        order.
    """
    if regions is None:
        regions = dataset.subject_regions

    result = {}
    for region in regions:
        logging.debug(f"Computing {len(registry)} sub-indices for {region}/{period}")
        result[region] = [
            compute_subindex(definition, dataset, region, period)
            for definition in registry
        ]
    return result


def registry_banking() -> List[SubIndexDefinition]:
    """The eight sub-indices of the aggregate banking-services provision index.

    All are benefit-direction levels normalized to the national value.
    Institutional provision is measured both per population (I1) and per GRP
    (I2). Loans to individuals are measured per population (I5), loans to
    legal entities per GRP (I6).
    """
    return [
        SubIndexDefinition(
            "I1_institutional_per_capita",
            "credit_institutions_count",
            Denominator.POPULATION,
        ),
        SubIndexDefinition(
            "I2_institutional_per_grp", "credit_institutions_count", Denominator.GRP
        ),
        SubIndexDefinition("I3_assets_per_grp", "bank_assets", Denominator.GRP),
        SubIndexDefinition("I4_capital_per_grp", "bank_capital", Denominator.GRP),
        SubIndexDefinition(
            "I5_loans_individuals_per_capita",
            "loans_individuals",
            Denominator.POPULATION,
        ),
        SubIndexDefinition(
            "I6_loans_legal_entities_per_grp",
            "loans_legal_entities",
            Denominator.GRP,
        ),
        SubIndexDefinition(
            "I7_savings_per_capita", "deposits_total", Denominator.POPULATION
        ),
        SubIndexDefinition(
            "I8_paid_services_per_capita",
            "paid_services_volume",
            Denominator.POPULATION,
        ),
    ]


def registry_health() -> List[SubIndexDefinition]:
    """The six sub-indices of the economic-health indicator.

    Unemployment and consumer-price dynamics are cost indicators. The price
    component reads ``cpi`` only; ``ppi`` stays available for custom
    registries.
    """
    return [
        SubIndexDefinition("H1_construction_volume", "construction_volume_index"),
        SubIndexDefinition(
            "H2_fixed_capital_investment_growth",
            "fixed_capital_investment",
            transform=Transform.YOY_GROWTH,
        ),
        SubIndexDefinition(
            "H3_retail_turnover_per_capita_growth",
            "retail_turnover",
            Denominator.POPULATION,
            Transform.YOY_GROWTH,
        ),
        SubIndexDefinition(
            "H4_paid_services_per_capita",
            "paid_services_volume",
            Denominator.POPULATION,
        ),
        SubIndexDefinition(
            "H5_unemployment_growth",
            "unemployment_rate",
            transform=Transform.YOY_GROWTH,
            direction=Direction.COST,
        ),
        SubIndexDefinition(
            "H6_cpi_growth",
            "cpi",
            transform=Transform.YOY_GROWTH,
            direction=Direction.COST,
        ),
    ]


def required_indicators(registry: Iterable[SubIndexDefinition]) -> List[str]:
    """Sorted indicator ids read by any definition of ``registry``."""
    return sorted({ind for definition in registry for ind in definition.indicators})


def required_periods(
    registry: Iterable[SubIndexDefinition], periods: Iterable[Period]
) -> List[Period]:
    """The requested periods plus the prior periods year-over-year
    definitions need."""
    periods = list(dict.fromkeys(periods))
    needed = list(periods)
    if any(d.transform == Transform.YOY_GROWTH for d in registry):
        for period in periods:
            previous = prior_period(period)
            if previous not in needed:
                needed.append(previous)
    return needed


def load_registry(
    source: Union[str, "os.PathLike[str]", IO[str]]
) -> List[SubIndexDefinition]:
    """Load a sub-index registry from JSON.

    The JSON document is an array of objects with the keys ``id``,
    ``numerator``, ``denominator``, ``transform``, ``direction`` and
    ``normalize_national``.

    Raises:
        ConfigurationError: the document is malformed, an entry is invalid, or
            ids are not unique.
    """
    try:
        if isinstance(source, (str, os.PathLike)):
            with open(source, "r", encoding="utf-8") as handle:
                payload = json.load(handle)
        else:
            payload = json.load(source)
    except json.JSONDecodeError as ex:
        raise ConfigurationError(f"registry is not valid JSON: {ex}") from ex

    if not isinstance(payload, list) or not payload:
        raise ConfigurationError("registry must be a non-empty JSON array")

    definitions = [SubIndexDefinition.from_dict(entry) for entry in payload]
    ids = [definition.id for definition in definitions]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"registry ids are not unique: {ids}")

    logging.debug(f"Loaded registry with {len(definitions)} definitions.")
    return definitions


def dump_registry(registry: Iterable[SubIndexDefinition]) -> str:
    """Serialize a registry to the JSON form read by :func:`load_registry`."""
    return json.dumps([d.to_dict() for d in registry], indent=2, sort_keys=True)
