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

import dataclasses
import hashlib
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..indices.classification import (
    RegionClassification,
    TypologyThresholds,
    build_profile,
    classify_quartiles,
    classify_typology,
)
from ..indices.composite import (
    CompositeIndexValue,
    DistrictIndexValue,
    IndexKind,
    WeightKind,
    aggregate_district,
    compute_health,
    compute_rbsp,
    correlate_indices,
)
from ..indices.distribution import QUARTILE_CONVENTION, summarize
from ..indices.errors import (
    ComputationError,
    ComputationStageError,
    ConfigurationError,
    DatasetValidationError,
)
from ..indices.ingestion import (
    DataFormat,
    IndicatorDataset,
    Period,
    load_dataset,
    validate_dataset,
)
from ..indices.subindex import (
    BUILTIN_REGISTRY_VERSION,
    SubIndexDefinition,
    compute_all_subindices,
    load_registry,
    registry_banking,
    registry_health,
    required_indicators,
    required_periods,
)
from .bundle import (
    IndexDistribution,
    PeriodCorrelation,
    RegionReport,
    ReportBundle,
    ReportMetadata,
)

BUILTIN_BANKING = "builtin:banking"
BUILTIN_HEALTH = "builtin:health"

# Short names accepted wherever an index is referenced on the command line.
INDEX_ALIASES = {
    "rbsp": IndexKind.BANKING_RBSP,
    "banking": IndexKind.BANKING_RBSP,
    "banking_rbsp": IndexKind.BANKING_RBSP,
    "health": IndexKind.ECONOMIC_HEALTH,
    "economic_health": IndexKind.ECONOMIC_HEALTH,
}


@dataclass(frozen=True)
class Registry:
    kind: IndexKind
    definitions: Tuple[SubIndexDefinition, ...]
    version: str


def builtin_registry(kind: IndexKind) -> Registry:
    if kind == IndexKind.BANKING_RBSP:
        return Registry(
            kind,
            tuple(registry_banking()),
            f"{BUILTIN_BANKING}@{BUILTIN_REGISTRY_VERSION}",
        )
    return Registry(
        kind, tuple(registry_health()), f"{BUILTIN_HEALTH}@{BUILTIN_REGISTRY_VERSION}"
    )


def resolve_registry(reference: str) -> Registry:
    """Resolve ``builtin:banking``, ``builtin:health`` or a JSON registry path.

    A JSON registry replaces the banking registry when it holds eight
    definitions and the health registry when it holds six.

    Raises:
        ConfigurationError: unknown built-in, unreadable file, or an arity
            matching neither composite.
    """
    if reference == BUILTIN_BANKING:
        return builtin_registry(IndexKind.BANKING_RBSP)
    if reference == BUILTIN_HEALTH:
        return builtin_registry(IndexKind.ECONOMIC_HEALTH)
    if reference.startswith("builtin:"):
        raise ConfigurationError(f"unknown built-in registry '{reference}'")

    try:
        with open(reference, "rb") as handle:
            digest = hashlib.sha256(handle.read()).hexdigest()
    except OSError as ex:
        raise ConfigurationError(f"cannot read registry '{reference}': {ex}") from ex

    definitions = tuple(load_registry(reference))
    for kind in IndexKind:
        if len(definitions) == kind.arity:
            return Registry(kind, definitions, f"sha256:{digest[:16]}")

    raise ConfigurationError(
        f"registry '{reference}' has {len(definitions)} definitions; "
        f"expected 8 (banking) or 6 (health)"
    )


def resolve_registries(references: Sequence[str]) -> Dict[IndexKind, Registry]:
    """Resolve registry references, filling unnamed kinds with built-ins."""
    registries = {kind: builtin_registry(kind) for kind in IndexKind}
    for reference in references:
        registry = resolve_registry(reference)
        registries[registry.kind] = registry
    return registries


@dataclass(frozen=True)
class RunConfig:
    """Everything :func:`run_pipeline` needs."""

    dataset: "os.PathLike[str] | str"
    periods: Tuple[Period, ...]
    registries: Dict[IndexKind, Registry] = field(
        default_factory=lambda: resolve_registries([])
    )
    data_format: Optional[DataFormat] = None
    weight_kind: WeightKind = WeightKind.POPULATION
    typology: Optional[TypologyThresholds] = None


def _staged(stage: str, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except ComputationStageError:
        raise
    except ComputationError as ex:
        raise ComputationStageError(stage, ex) from ex


def require_periods(periods: Sequence[Period]):
    """Raise ConfigurationError for an empty period list."""
    if not periods:
        raise ConfigurationError("at least one period is required")


def load_for_run(config: RunConfig) -> IndicatorDataset:
    """Load the configured dataset and validate it for the configured run.

    Raises:
        ConfigurationError: no periods were requested (raised before any IO).
        DatasetValidationError: required observations are missing.
    """
    require_periods(config.periods)

    dataset = load_dataset(config.dataset, config.data_format)

    definitions = [d for r in config.registries.values() for d in r.definitions]
    required = required_indicators(definitions)
    report = validate_dataset(
        dataset,
        required,
        required_periods(definitions, config.periods),
        registered=required,
    )
    if not report.accepted:
        for issue in report.errors[:20]:
            logging.error(f"Validation error: {issue.message}")
        raise DatasetValidationError(report)

    return dataset


def composites_for(
    dataset: IndicatorDataset, registry: Registry, period: Period
) -> Dict[str, CompositeIndexValue]:
    """Compute one composite for every subject region of a cross-section."""
    subindices = _staged(
        "subindex_engine",
        compute_all_subindices,
        registry.definitions,
        dataset,
        period,
    )
    if registry.kind == IndexKind.BANKING_RBSP:
        compose = compute_rbsp
    else:
        compose = compute_health
    return {
        region: _staged("composite_indices", compose, values)
        for region, values in subindices.items()
    }


def _values(composites: Mapping[str, CompositeIndexValue]) -> Dict[str, float]:
    return {region: c.value for region, c in composites.items()}


def district_weights(
    dataset: IndicatorDataset, period: Period, weight_kind: WeightKind
) -> Optional[Dict[str, float]]:
    if weight_kind == WeightKind.UNWEIGHTED:
        return None
    weights = {}
    for region in dataset.subject_regions:
        observation = dataset.get(region, weight_kind.value, period)
        if observation is not None:
            weights[region] = observation.value
    return weights


def _districts_for(
    dataset: IndicatorDataset,
    kind: IndexKind,
    composites: Dict[str, CompositeIndexValue],
    period: Period,
    weight_kind: WeightKind,
) -> List[DistrictIndexValue]:
    weights = district_weights(dataset, period, weight_kind)
    return [
        _staged(
            "composite_indices",
            aggregate_district,
            [(region, composites[region].value) for region in members],
            weights,
            weight_kind,
            district_code=district,
            period=period,
            index_kind=kind,
        )
        for district, members in dataset.districts().items()
    ]


def classify_cross_section(
    dataset: IndicatorDataset,
    values: Mapping[str, float],
    period: Period,
    thresholds: Optional[TypologyThresholds] = None,
) -> Dict[str, RegionClassification]:
    """Quartile-classify a cross-section, adding typologies when
    ``thresholds`` are given."""
    classes = _staged("classification", classify_quartiles, values, period)
    if thresholds is None:
        return classes

    for region, classification in classes.items():
        profile = build_profile(dataset, region, period, thresholds.features)
        typology = _staged("classification", classify_typology, profile, thresholds)
        classes[region] = dataclasses.replace(classification, typology=typology)
    return classes


def run_pipeline(config: RunConfig) -> ReportBundle:
    """Load, validate and compute everything a report holds.

    Stages run in order: load, validate, sub-indices, both composites,
    district aggregates, distribution summaries, classifications, and the
    health-versus-banking correlation. Output is deterministic for identical
    inputs.

    Raises:
        ConfigurationError: the configuration is unusable (e.g. no periods).
        DataError: the dataset failed to load or validate.
        ComputationError: an index could not be computed; the stage is named
            in the message.
    """
    dataset = load_for_run(config)
    banking_registry = config.registries[IndexKind.BANKING_RBSP]
    health_registry = config.registries[IndexKind.ECONOMIC_HEALTH]

    per_region: List[RegionReport] = []
    per_district: List[DistrictIndexValue] = []
    distribution: List[IndexDistribution] = []
    correlation: List[PeriodCorrelation] = []

    for period in config.periods:
        logging.info(
            f"Computing indices for {len(dataset.subject_regions)} regions, "
            f"{period}..."
        )
        banking = composites_for(dataset, banking_registry, period)
        health = composites_for(dataset, health_registry, period)

        for kind, composites in (
            (IndexKind.BANKING_RBSP, banking),
            (IndexKind.ECONOMIC_HEALTH, health),
        ):
            per_district.extend(
                _districts_for(dataset, kind, composites, period, config.weight_kind)
            )
            summary = _staged(
                "distribution_stats", summarize, list(_values(composites).values())
            )
            distribution.append(IndexDistribution(kind, period, summary))

        banking_classes = classify_cross_section(
            dataset, _values(banking), period, config.typology
        )
        health_classes = classify_cross_section(
            dataset, _values(health), period, config.typology
        )

        for region in dataset.subject_regions:
            per_region.append(
                RegionReport(
                    region_code=region,
                    region_name=dataset.region_name(region),
                    district_code=dataset.district_code(region),
                    period=period,
                    banking=banking[region],
                    health=health[region],
                    banking_classification=banking_classes[region],
                    health_classification=health_classes[region],
                )
            )

        r_squared = _staged(
            "composite_indices",
            correlate_indices,
            [(health[r].value, banking[r].value) for r in dataset.subject_regions],
        )
        logging.info(f"Health vs banking R^2 for {period}: {r_squared:.4f}")
        correlation.append(PeriodCorrelation(period, r_squared))

    metadata = ReportMetadata(
        dataset_path=os.fspath(config.dataset),
        registry_versions=tuple(
            sorted((kind.value, r.version) for kind, r in config.registries.items())
        ),
        periods=tuple(config.periods),
        quartile_convention=QUARTILE_CONVENTION,
        weight_kind=config.weight_kind.value,
    )
    return ReportBundle(
        metadata=metadata,
        per_region=tuple(per_region),
        per_district=tuple(per_district),
        distribution=tuple(distribution),
        correlation=tuple(correlation),
    )


def cross_section(
    dataset: IndicatorDataset,
    reference: str,
    period: Period,
    registries: Dict[IndexKind, Registry],
) -> Dict[str, float]:
    """Values of an index or a single sub-index across subject regions.

    Args:
        reference: ``rbsp``/``health`` (or their long names) for a composite,
            otherwise a sub-index id from one of ``registries``.

    Raises:
        ConfigurationError: ``reference`` names nothing known.
    """
    if reference in INDEX_ALIASES:
        kind = INDEX_ALIASES[reference]
        return _values(composites_for(dataset, registries[kind], period))

    for registry in registries.values():
        for definition in registry.definitions:
            if definition.id == reference:
                values = _staged(
                    "subindex_engine",
                    compute_all_subindices,
                    [definition],
                    dataset,
                    period,
                )
                return {region: v[0].value for region, v in values.items()}

    raise ConfigurationError(f"'{reference}' is neither an index nor a sub-index id")
