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

from .classification import (
    LeaderFlag,
    QuartileBand,
    RegionClassification,
    RegionProfile,
    Typology,
    TypologyThresholds,
    build_profile,
    classify_quartiles,
    classify_typology,
    load_thresholds,
)
from .composite import (
    CompositeIndexValue,
    DistrictIndexValue,
    IndexKind,
    WeightKind,
    aggregate_district,
    compute_health,
    compute_rbsp,
    correlate_indices,
    decompose_contributions,
)
from .distribution import (
    QUARTILE_CONVENTION,
    DistributionSummary,
    quartile_bounds,
    summarize,
)
from .ingestion import (
    NATIONAL_REGION_CODE,
    DataFormat,
    IndicatorDataset,
    IndicatorObservation,
    ValidationReport,
    load_dataset,
    validate_dataset,
)
from .subindex import (
    Denominator,
    Direction,
    SubIndexDefinition,
    SubIndexValue,
    Transform,
    compute_all_subindices,
    compute_subindex,
    compute_yoy_growth,
    dump_registry,
    load_registry,
    normalize_to_national,
    registry_banking,
    registry_health,
    required_indicators,
)
