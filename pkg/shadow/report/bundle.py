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

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..indices.classification import LeaderFlag, RegionClassification
from ..indices.composite import CompositeIndexValue, DistrictIndexValue, IndexKind
from ..indices.distribution import DistributionSummary
from ..indices.ingestion import Period


@dataclass(frozen=True)
class ReportMetadata:
    """Provenance of a report, so consumers can detect methodology drift."""

    dataset_path: str
    registry_versions: Tuple[Tuple[str, str], ...]
    periods: Tuple[Period, ...]
    quartile_convention: str
    weight_kind: str

    def to_dict(self) -> Dict[str, object]:
        return {
            "dataset_path": self.dataset_path,
            "registry_versions": dict(self.registry_versions),
            "periods": list(self.periods),
            "quartile_convention": self.quartile_convention,
            "weight_kind": self.weight_kind,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "ReportMetadata":
        return ReportMetadata(
            dataset_path=data["dataset_path"],
            registry_versions=tuple(sorted(data["registry_versions"].items())),
            periods=tuple(data["periods"]),
            quartile_convention=data["quartile_convention"],
            weight_kind=data["weight_kind"],
        )


@dataclass(frozen=True)
class RegionReport:
    """Both composites and their classifications for one region and period."""

    region_code: str
    region_name: str
    district_code: str
    period: Period
    banking: CompositeIndexValue
    health: CompositeIndexValue
    banking_classification: RegionClassification
    health_classification: RegionClassification

    @property
    def banking_value(self) -> float:
        return self.banking.value

    @property
    def health_value(self) -> float:
        return self.health.value

    def composite(self, kind: IndexKind) -> CompositeIndexValue:
        return self.banking if kind == IndexKind.BANKING_RBSP else self.health

    def classification(self, kind: IndexKind) -> RegionClassification:
        if kind == IndexKind.BANKING_RBSP:
            return self.banking_classification
        return self.health_classification

    def to_dict(self) -> Dict[str, object]:
        return {
            "region_code": self.region_code,
            "region_name": self.region_name,
            "district_code": self.district_code,
            "period": self.period,
            "banking_value": self.banking_value,
            "health_value": self.health_value,
            "banking": self.banking.to_dict(),
            "health": self.health.to_dict(),
            "banking_classification": self.banking_classification.to_dict(),
            "health_classification": self.health_classification.to_dict(),
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "RegionReport":
        return RegionReport(
            region_code=data["region_code"],
            region_name=data["region_name"],
            district_code=data["district_code"],
            period=data["period"],
            banking=CompositeIndexValue.from_dict(data["banking"]),
            health=CompositeIndexValue.from_dict(data["health"]),
            banking_classification=RegionClassification.from_dict(
                data["banking_classification"]
            ),
            health_classification=RegionClassification.from_dict(
                data["health_classification"]
            ),
        )


@dataclass(frozen=True)
class IndexDistribution:
    index_kind: IndexKind
    period: Period
    summary: DistributionSummary

    def to_dict(self) -> Dict[str, object]:
        return {
            "index_kind": self.index_kind.value,
            "period": self.period,
            "summary": self.summary.to_dict(),
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "IndexDistribution":
        return IndexDistribution(
            index_kind=IndexKind(data["index_kind"]),
            period=data["period"],
            summary=DistributionSummary.from_dict(data["summary"]),
        )


@dataclass(frozen=True)
class PeriodCorrelation:
    """Health-versus-banking coefficient of determination for one period."""

    period: Period
    r_squared: float

    def to_dict(self) -> Dict[str, object]:
        return {"period": self.period, "r_squared": self.r_squared}

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "PeriodCorrelation":
        return PeriodCorrelation(period=data["period"], r_squared=data["r_squared"])


@dataclass(frozen=True)
class ReportBundle:
    """Everything one pipeline run produces."""

    metadata: ReportMetadata
    per_region: Tuple[RegionReport, ...] = field(default=())
    per_district: Tuple[DistrictIndexValue, ...] = field(default=())
    distribution: Tuple[IndexDistribution, ...] = field(default=())
    correlation: Tuple[PeriodCorrelation, ...] = field(default=())

    def regions_for(self, period: Period) -> List[RegionReport]:
        return [r for r in self.per_region if r.period == period]

    def group(
        self, kind: IndexKind, period: Period, flag: LeaderFlag
    ) -> List[RegionReport]:
        """Regions flagged ``flag`` on the ``kind`` cross-section of
        ``period``, highest index value first."""
        members = [
            r
            for r in self.regions_for(period)
            if r.classification(kind).leader_flag == flag
        ]
        return sorted(
            members, key=lambda r: (-r.composite(kind).value, r.region_code)
        )

    def distribution_for(
        self, kind: IndexKind, period: Period
    ) -> Optional[DistributionSummary]:
        for entry in self.distribution:
            if entry.index_kind == kind and entry.period == period:
                return entry.summary
        return None

    def to_dict(self) -> Dict[str, object]:
        return {
            "metadata": self.metadata.to_dict(),
            "per_region": [r.to_dict() for r in self.per_region],
            "per_district": [d.to_dict() for d in self.per_district],
            "distribution": [d.to_dict() for d in self.distribution],
            "correlation": [c.to_dict() for c in self.correlation],
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "ReportBundle":
        return ReportBundle(
            metadata=ReportMetadata.from_dict(data["metadata"]),
            per_region=tuple(RegionReport.from_dict(r) for r in data["per_region"]),
            per_district=tuple(
                DistrictIndexValue.from_dict(d) for d in data["per_district"]
            ),
            distribution=tuple(
                IndexDistribution.from_dict(d) for d in data["distribution"]
            ),
            correlation=tuple(
                PeriodCorrelation.from_dict(c) for c in data["correlation"]
            ),
        )
