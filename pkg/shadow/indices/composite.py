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

import logging
import math
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ArityError,
    EmptyGroup,
    InsufficientData,
    MissingWeight,
    MixedKeyError,
    NonPositiveValue,
    ZeroVariance,
)
from .ingestion import Period
from .subindex import SubIndexValue

# Below this magnitude the log-sum is treated as zero (composite value 1).
_LOG_SUM_EPSILON = 1e-12


@unique
class IndexKind(Enum):
    """The two composite indices.

    **Values:**

    BANKING_RBSP
        Aggregate index of a region's banking-services provision, the 8th
        root of the product of eight sub-indices.
    ECONOMIC_HEALTH
        Economic-health indicator, the 6th root of the product of six
        sub-indices.
    """

    BANKING_RBSP = "banking_rbsp"
    ECONOMIC_HEALTH = "economic_health"

    @property
    def arity(self) -> int:
        return 8 if self == IndexKind.BANKING_RBSP else 6


@unique
class WeightKind(Enum):
    """Weights used when aggregating regions into a federal district."""

    POPULATION = "population"
    GRP = "grp"
    UNWEIGHTED = "unweighted"


@dataclass(frozen=True)
class CompositeIndexValue:
    index_kind: IndexKind
    region_code: str
    period: Period
    value: float
    subindices: Tuple[SubIndexValue, ...]
    contributions: Tuple[float, ...] = field(default=())

    def to_dict(self) -> Dict[str, object]:
        return {
            "index_kind": self.index_kind.value,
            "region_code": self.region_code,
            "period": self.period,
            "value": self.value,
            "subindices": [s.to_dict() for s in self.subindices],
            "contributions": list(self.contributions),
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "CompositeIndexValue":
        return CompositeIndexValue(
            index_kind=IndexKind(data["index_kind"]),
            region_code=data["region_code"],
            period=data["period"],
            value=data["value"],
            subindices=tuple(SubIndexValue.from_dict(s) for s in data["subindices"]),
            contributions=tuple(data["contributions"]),
        )


@dataclass(frozen=True)
class DistrictIndexValue:
    """A composite index aggregated over the regions of a federal district."""

    district_code: str
    period: Period
    value: float
    member_regions: Tuple[str, ...]
    weight_kind: WeightKind
    index_kind: IndexKind = IndexKind.BANKING_RBSP

    def to_dict(self) -> Dict[str, object]:
        return {
            "district_code": self.district_code,
            "period": self.period,
            "value": self.value,
            "member_regions": list(self.member_regions),
            "weight_kind": self.weight_kind.value,
            "index_kind": self.index_kind.value,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "DistrictIndexValue":
        return DistrictIndexValue(
            district_code=data["district_code"],
            period=data["period"],
            value=data["value"],
            member_regions=tuple(data["member_regions"]),
            weight_kind=WeightKind(data["weight_kind"]),
            index_kind=IndexKind(data["index_kind"]),
        )


def geometric_mean(values: Sequence[float], weights: Optional[Sequence[float]] = None):
    """Weighted geometric mean computed in log space.

    ``exp(sum(w * log(x)) / sum(w))`` stays finite where the direct product
    of many large or small factors would overflow or underflow.
    """
    logs = np.log(np.asarray(values, dtype=float))
    if weights is None:
        return float(np.exp(np.mean(logs)))

    w = np.asarray(weights, dtype=float)
    return float(np.exp(np.sum(w * logs) / np.sum(w)))


def _compose(
    kind: IndexKind, subindices: Sequence[SubIndexValue]
) -> CompositeIndexValue:
    if len(subindices) != kind.arity:
        raise ArityError(
            f"{kind.value} needs exactly {kind.arity} sub-indices, "
            f"got {len(subindices)}"
        )

    keys = {(s.region_code, s.period) for s in subindices}
    if len(keys) != 1:
        raise MixedKeyError(
            f"{kind.value} sub-indices mix regions/periods: {sorted(map(str, keys))}"
        )

    for subindex in subindices:
        if not math.isfinite(subindex.value) or subindex.value <= 0:
            raise NonPositiveValue(subindex.definition_id, subindex.value)

    region, period = keys.pop()
    composite = CompositeIndexValue(
        index_kind=kind,
        region_code=region,
        period=period,
        value=geometric_mean([s.value for s in subindices]),
        subindices=tuple(subindices),
    )
    contributions = tuple(decompose_contributions(composite))
    return CompositeIndexValue(
        index_kind=kind,
        region_code=region,
        period=period,
        value=composite.value,
        subindices=composite.subindices,
        contributions=contributions,
    )


def compute_rbsp(subindices: Sequence[SubIndexValue]) -> CompositeIndexValue:
    """Aggregate index of a region's banking-services provision::

        I_rbsp = (I1 * I2 * I3 * I4 * I5 * I6 * I7 * I8) ** (1 / 8)

    Raises:
        ArityError: not exactly eight sub-indices.
        NonPositiveValue: a sub-index is zero, negative, or not finite.
        MixedKeyError: sub-indices belong to different regions or periods.
    """
    return _compose(IndexKind.BANKING_RBSP, subindices)


def compute_health(subindices: Sequence[SubIndexValue]) -> CompositeIndexValue:
    """Economic-health indicator, the geometric mean of six sub-indices.

    Cost sub-indices are expected to be inverted already.
    """
    return _compose(IndexKind.ECONOMIC_HEALTH, subindices)


def decompose_contributions(composite: CompositeIndexValue) -> List[float]:
    """Log-share of each sub-index in a composite value.

    ``contribution_i = ln(v_i) / sum_j ln(v_j)``. When the log-sum is zero
    (composite value 1) every sub-index gets the uniform share ``1/k``.
    """
    values = [s.value for s in composite.subindices]
    for subindex in composite.subindices:
        if subindex.value <= 0:
            raise NonPositiveValue(subindex.definition_id, subindex.value)

    logs = np.log(np.asarray(values, dtype=float))
    total = float(np.sum(logs))
    if abs(total) < _LOG_SUM_EPSILON:
        return [1.0 / len(values)] * len(values)
    return [float(x) for x in logs / total]


def aggregate_district(
    values: Sequence[Tuple[str, float]],
    weights: Optional[Mapping[str, float]],
    weight_kind: WeightKind,
    district_code: str = "",
    period: Period = 0,
    index_kind: IndexKind = IndexKind.BANKING_RBSP,
) -> DistrictIndexValue:
    """Aggregate regional composite values to a federal district.

    The district value is the weighted geometric mean
    ``exp(sum(w_i ln v_i) / sum(w_i))``; weights are ignored (uniform) when
    ``weight_kind`` is ``UNWEIGHTED``.

    Raises:
        EmptyGroup: ``values`` is empty.
        NonPositiveValue: a value or a weight is not strictly positive.
        MissingWeight: a listed region has no weight.
    """
    if not values:
        raise EmptyGroup(f"district '{district_code}' has no member regions")

    regions = [region for region, _ in values]
    for region, value in values:
        if not math.isfinite(value) or value <= 0:
            raise NonPositiveValue(region, value)

    if weight_kind == WeightKind.UNWEIGHTED:
        region_weights = [1.0] * len(values)
    else:
        region_weights = []
        for region in regions:
            if weights is None or region not in weights:
                raise MissingWeight(
                    f"no {weight_kind.value} weight for region '{region}'"
                )
            weight = weights[region]
            if not math.isfinite(weight) or weight <= 0:
                raise NonPositiveValue(f"{region} weight", weight)
            region_weights.append(weight)

    value = geometric_mean([v for _, v in values], region_weights)

    # Rounding must not push the mean outside the member range.
    lowest = min(v for _, v in values)
    highest = max(v for _, v in values)
    value = min(max(value, lowest), highest)

    logging.debug(
        f"District {district_code}/{period}: {len(values)} regions -> {value:.6g}"
    )
    return DistrictIndexValue(
        district_code=district_code,
        period=period,
        value=value,
        member_regions=tuple(regions),
        weight_kind=weight_kind,
        index_kind=index_kind,
    )


def correlate_indices(pairs: Sequence[Tuple[float, float]]) -> float:
    """Coefficient of determination (squared Pearson correlation) between
    health and banking values.

    Raises:
        InsufficientData: fewer than three pairs.
        ZeroVariance: either coordinate is constant.
    """
    if len(pairs) < 3:
        raise InsufficientData(f"correlation needs >= 3 pairs, got {len(pairs)}")

    data = np.asarray(pairs, dtype=float)
    if np.ptp(data[:, 0]) == 0 or np.ptp(data[:, 1]) == 0:
        raise ZeroVariance("correlation is undefined for a constant coordinate")

    x = data[:, 0] - data[:, 0].mean()
    y = data[:, 1] - data[:, 1].mean()
    sxx = float(np.dot(x, x))
    syy = float(np.dot(y, y))
    if sxx == 0 or syy == 0:
        raise ZeroVariance("correlation is undefined for a constant coordinate")

    r = float(np.dot(x, y)) / math.sqrt(sxx * syy)
    return min(max(r * r, 0.0), 1.0)
