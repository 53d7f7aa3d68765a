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
import logging
import math
import os
import re
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import (
    IO,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Tuple,
    Union,
)

import pandas as pd

from .errors import (
    DuplicateKeyError,
    MissingObservation,
    NonFiniteValueError,
    ParseError,
    UnknownIndicatorError,
)

Period = Union[int, str]
ObservationKey = Tuple[str, str, Period]
Source = Union[str, "os.PathLike[str]", IO[bytes], bytes]

NATIONAL_REGION_CODE = "RU"

CSV_COLUMNS = (
    "region_code",
    "region_name",
    "district_code",
    "indicator_id",
    "period",
    "value",
    "unit",
)

# Indicators consumed by the built-in sub-index registries, plus ppi.
CORE_INDICATORS = (
    "construction_volume_index",
    "fixed_capital_investment",
    "retail_turnover",
    "paid_services_volume",
    "unemployment_rate",
    "cpi",
    "ppi",
    "credit_institutions_count",
    "bank_assets",
    "bank_capital",
    "loans_individuals",
    "loans_legal_entities",
    "deposits_total",
    "population",
    "grp",
)

# Region profile series used by the typology classifier.
PROFILE_INDICATORS = (
    "household_income",
    "savings_rate",
    "income_gini",
    "export_oriented",
    "infrastructure_index",
)

INDICATOR_VOCABULARY: FrozenSet[str] = frozenset(CORE_INDICATORS + PROFILE_INDICATORS)

MIN_YEAR = 1990
MAX_YEAR = 2100

_YEAR_RE = re.compile(r"^(\d{4})$")
_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_COMMA_DECIMAL_RE = re.compile(r"^[+-]?\d*,\d+$")


@unique
class DataFormat(Enum):
    """Supported source file formats.

    **Values:**

    CSV
        Header row followed by one observation per line (the canonical form).
    JSON
        An array of objects carrying the same seven keys as the CSV header.
    """

    CSV = "csv"
    JSON = "json"


def parse_period(raw: Union[str, int]) -> Period:
    """Parse a period token.

    Args:
        raw: ``"YYYY"`` (or an int year) for annual series, ``"YYYY-MM"`` for
            monthly price series.

    Returns:
        An ``int`` year or the normalized ``"YYYY-MM"`` string.

    Raises:
        ValueError: the token is not a year in 1990-2100 or a valid month.
    """
    text = str(raw).strip()

    match = _YEAR_RE.match(text)
    if match:
        year = int(match[1])
        if not MIN_YEAR <= year <= MAX_YEAR:
            raise ValueError(f"year {year} outside {MIN_YEAR}-{MAX_YEAR}")
        return year

    match = _MONTH_RE.match(text)
    if match:
        year, month = int(match[1]), int(match[2])
        if not MIN_YEAR <= year <= MAX_YEAR:
            raise ValueError(f"year {year} outside {MIN_YEAR}-{MAX_YEAR}")
        if not 1 <= month <= 12:
            raise ValueError(f"month {month:02d} is not a calendar month")
        return f"{year:04d}-{month:02d}"

    raise ValueError(f"'{text}' is neither YYYY nor YYYY-MM")


def prior_period(period: Period) -> Period:
    """Get the period one year before ``period`` (same month for monthly
    periods)."""
    if isinstance(period, int):
        return period - 1

    year, month = period.split("-")
    return f"{int(year) - 1:04d}-{month}"


def _period_sort_key(period: Period) -> str:
    return str(period)


@dataclass(frozen=True)
class IndicatorObservation:
    """One raw value of one indicator for one region and period."""

    region_code: str
    region_name: str
    district_code: str
    indicator_id: str
    period: Period
    value: float
    unit: str

    @property
    def key(self) -> ObservationKey:
        return (self.region_code, self.indicator_id, self.period)


def _observation_sort_key(observation: IndicatorObservation):
    region, indicator, period = observation.key
    return (region, indicator, _period_sort_key(period))


@dataclass(frozen=True)
class IndicatorDataset:
    """Immutable, keyed collection of indicator observations.

    Observations are stored sorted by key, so two datasets holding the same
    observations compare equal whatever order the source rows were in.

    Example::

        dataset = load_dataset("fixtures/synthetic_85.csv")
        dataset.value("RU", "population", 2019)
    """

    observations: Tuple[IndicatorObservation, ...]
    national_region_code: str = NATIONAL_REGION_CODE
    source_rows: Mapping[ObservationKey, int] = field(
        default_factory=dict, compare=False, repr=False
    )
    _index: Dict[ObservationKey, IndicatorObservation] = field(
        init=False, compare=False, repr=False
    )
    _region_rows: Dict[str, IndicatorObservation] = field(
        init=False, compare=False, repr=False
    )

    def __post_init__(self):
        ordered = tuple(sorted(self.observations, key=_observation_sort_key))
        index = {}
        for observation in ordered:
            if observation.key in index:
                raise DuplicateKeyError(
                    observation.key,
                    self.source_rows.get(observation.key, 0),
                    self.source_rows.get(observation.key, 0),
                )
            index[observation.key] = observation
        object.__setattr__(self, "observations", ordered)
        object.__setattr__(self, "_index", index)

        region_rows = {}
        for observation in ordered:
            region_rows.setdefault(observation.region_code, observation)
        object.__setattr__(self, "_region_rows", region_rows)

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self) -> Iterator[IndicatorObservation]:
        return iter(self.observations)

    def __contains__(self, key: ObservationKey) -> bool:
        return key in self._index

    def get(
        self, region_code: str, indicator_id: str, period: Period
    ) -> Optional[IndicatorObservation]:
        return self._index.get((region_code, indicator_id, period))

    def value(self, region_code: str, indicator_id: str, period: Period) -> float:
        """Get a raw value.

        Raises:
            MissingObservation: no observation exists for the triple.
        """
        observation = self.get(region_code, indicator_id, period)
        if observation is None:
            raise MissingObservation(region_code, indicator_id, period)
        return observation.value

    @property
    def regions(self) -> Tuple[str, ...]:
        """Sorted codes of every region in the dataset, national row-set
        included."""
        return tuple(sorted(self._region_rows))

    @property
    def subject_regions(self) -> Tuple[str, ...]:
        """Sorted region codes excluding the national row-set."""
        return tuple(r for r in self.regions if r != self.national_region_code)

    @property
    def indicators(self) -> Tuple[str, ...]:
        return tuple(sorted({obs.indicator_id for obs in self.observations}))

    @property
    def periods(self) -> Tuple[Period, ...]:
        return tuple(
            sorted({obs.period for obs in self.observations}, key=_period_sort_key)
        )

    @property
    def has_national(self) -> bool:
        return self.national_region_code in self._region_rows

    def region_name(self, region_code: str) -> str:
        return self._region_attribute(region_code).region_name

    def district_code(self, region_code: str) -> str:
        return self._region_attribute(region_code).district_code

    def districts(self) -> Dict[str, List[str]]:
        """Map each federal district to its member subject regions."""
        members: Dict[str, List[str]] = {}
        for region in self.subject_regions:
            members.setdefault(self.district_code(region), []).append(region)
        return dict(sorted(members.items()))

    def first_row_of(self, indicator_id: str) -> Optional[int]:
        """Get the lowest source row holding ``indicator_id``, if known."""
        rows = [
            row for key, row in self.source_rows.items() if key[1] == indicator_id
        ]
        return min(rows) if rows else None

    def _region_attribute(self, region_code: str) -> IndicatorObservation:
        if region_code in self._region_rows:
            return self._region_rows[region_code]
        raise KeyError(f"region '{region_code}' is not in the dataset")


class ValidationIssue(NamedTuple):
    row: Optional[int]
    rule: str
    message: str


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_dataset`. The dataset is accepted if and
    only if ``errors`` is empty."""

    errors: List[ValidationIssue] = field(default_factory=list)
    warnings: List[ValidationIssue] = field(default_factory=list)
    row_count: int = 0

    @property
    def accepted(self) -> bool:
        return not self.errors


def load_dataset(
    source: Source, format: Optional[DataFormat] = None
) -> IndicatorDataset:
    """Load and validate indicator observations from a CSV or JSON source.

    Args:
        source:
            A file path, a binary stream, or raw bytes.
        format:
            The source format. When omitted it is inferred from the file
            suffix, falling back to CSV.

    Returns:
        An immutable dataset.

    Raises:
        ParseError: a row is malformed (carries the row number), or the source
            is not valid UTF-8.
        NonFiniteValueError: a value is NaN or infinite.
        DuplicateKeyError: the same region/indicator/period appears twice.
        UnknownIndicatorError: an indicator id is not in the vocabulary.
    """
    data_format = _resolve_format(source, format)
    label = _source_label(source)
    logging.info(f"Loading {data_format.value} dataset from '{label}'...")

    if data_format == DataFormat.CSV:
        records = _read_csv_records(source)
    else:
        records = _read_json_records(source)

    observations = []
    rows: Dict[ObservationKey, int] = {}
    for row, record in records:
        observation = _parse_record(record, row)
        if observation.key in rows:
            raise DuplicateKeyError(observation.key, rows[observation.key], row)
        rows[observation.key] = row
        observations.append(observation)

    dataset = IndicatorDataset(tuple(observations), source_rows=rows)
    logging.info(
        f"Loaded {len(dataset)} observations for {len(dataset.regions)} regions."
    )
    return dataset


def validate_dataset(
    dataset: IndicatorDataset,
    required: Iterable[str],
    periods: Iterable[Period],
    registered: Optional[Iterable[str]] = None,
) -> ValidationReport:
    """Check a dataset for coverage gaps and "information garbage".

    Every (region, required indicator, period) triple without an observation
    is an error. Every indicator present in the dataset that no registered
    sub-index consumes is a warning. This function never raises.

    Args:
        dataset: The dataset to check.
        required: Indicator ids that must be present.
        periods: Periods that must be covered.
        registered: Indicator ids consumed by the registered sub-indices.
            Defaults to those of the built-in banking and health registries.
    """
    if registered is None:
        from .subindex import registry_banking, registry_health, required_indicators

        registered = required_indicators(registry_banking() + registry_health())

    report = ValidationReport(row_count=len(dataset))
    required = list(dict.fromkeys(required))
    periods = list(dict.fromkeys(periods))

    for region in dataset.regions:
        for indicator in required:
            for period in periods:
                if (region, indicator, period) not in dataset:
                    report.errors.append(
                        ValidationIssue(
                            None,
                            "missing-observation",
                            f"no observation for ({region}, {indicator}, {period})",
                        )
                    )

    for indicator in sorted(set(dataset.indicators) - set(registered)):
        report.warnings.append(
            ValidationIssue(
                dataset.first_row_of(indicator),
                "unregistered-indicator",
                f"indicator '{indicator}' is not used by any registered sub-index",
            )
        )

    if dataset.regions and not dataset.has_national:
        report.warnings.append(
            ValidationIssue(
                None,
                "national-baseline-absent",
                f"no '{dataset.national_region_code}' rows; "
                f"national normalization will fail",
            )
        )

    for issue in report.warnings:
        logging.warning(f"Validation warning: {issue.message}")
    logging.info(
        f"Validation finished: {len(report.errors)} error(s), "
        f"{len(report.warnings)} warning(s)."
    )
    return report


def _resolve_format(source: Source, data_format: Optional[DataFormat]) -> DataFormat:
    if data_format is not None:
        return DataFormat(data_format)
    if isinstance(source, (str, os.PathLike)):
        if os.fspath(source).lower().endswith(".json"):
            return DataFormat.JSON
    return DataFormat.CSV


def _source_label(source: Source) -> str:
    if isinstance(source, (str, os.PathLike)):
        return os.fspath(source)
    return "<stream>"


def _as_reader(source: Source):
    if isinstance(source, bytes):
        return io.BytesIO(source)
    return source


def _read_text(source: Source, numbered_lines: bool) -> str:
    """Read ``source`` as strict UTF-8 text.

    Raises:
        ParseError: the bytes are not valid UTF-8. With ``numbered_lines`` the
            error carries the physical line of the bad byte as its row.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as handle:
            raw = handle.read()
    else:
        raw = _as_reader(source).read()
    if isinstance(raw, str):
        return raw.lstrip("\ufeff")

    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as ex:
        line = raw[: ex.start].count(b"\n") + 1
        raise ParseError(
            f"invalid UTF-8 byte 0x{raw[ex.start]:02x} on line {line}",
            row=line if numbered_lines else None,
        ) from ex
    return text.lstrip("\ufeff")


def _read_csv_records(source: Source) -> List[Tuple[int, Dict[str, str]]]:
    """Read CSV rows as strings, keyed by column name.

    Row numbers are physical line numbers, the header being row 1. Blank
    lines are skipped but still counted.
    """
    text = _read_text(source, numbered_lines=True)
    try:
        frame = pd.read_csv(
            io.StringIO(text),
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty; a header row is required", row=1)
    except pd.errors.ParserError as ex:
        match = re.search(r"line (\d+)", str(ex))
        row = int(match[1]) if match else None
        raise ParseError(f"malformed CSV ({ex})", row=row) from ex

    header = [str(column) for column in frame.columns]
    if header != list(CSV_COLUMNS):
        raise ParseError(
            f"header must be exactly '{','.join(CSV_COLUMNS)}', "
            f"got '{','.join(header)}'",
            row=1,
        )

    blank = {n for n, line in enumerate(text.split("\n"), 1) if not line.strip("\r")}
    frame = frame.fillna("")
    return [
        (offset + 2, record)
        for offset, record in enumerate(frame.to_dict(orient="records"))
        if offset + 2 not in blank
    ]


def _read_json_records(source: Source) -> List[Tuple[int, Dict[str, str]]]:
    """Read JSON records. Row numbers are 1-based array positions."""
    text = _read_text(source, numbered_lines=False)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as ex:
        raise ParseError(f"malformed JSON at line {ex.lineno}: {ex.msg}") from ex

    if not isinstance(payload, list):
        raise ParseError("JSON dataset must be an array of objects")

    records = []
    for offset, item in enumerate(payload):
        row = offset + 1
        if not isinstance(item, dict):
            raise ParseError("record is not an object", row=row)
        if set(item) != set(CSV_COLUMNS):
            raise ParseError(
                f"record keys must be exactly {', '.join(CSV_COLUMNS)}", row=row
            )
        records.append(
            (row, {k: "" if v is None else str(v) for k, v in item.items()})
        )
    return records


def _parse_record(record: Mapping[str, str], row: int) -> IndicatorObservation:
    fields = {}
    for column in CSV_COLUMNS:
        text = str(record.get(column, "")).strip()
        if not text:
            raise ParseError(f"missing value in column '{column}'", row=row)
        fields[column] = text

    indicator = fields["indicator_id"]
    if indicator not in INDICATOR_VOCABULARY:
        raise UnknownIndicatorError(indicator, row=row)

    try:
        period = parse_period(fields["period"])
    except ValueError as ex:
        raise ParseError(f"invalid period: {ex}", row=row) from ex

    return IndicatorObservation(
        region_code=fields["region_code"],
        region_name=fields["region_name"],
        district_code=fields["district_code"],
        indicator_id=indicator,
        period=period,
        value=_parse_value(fields["value"], row),
        unit=fields["unit"],
    )


def _parse_value(text: str, row: int) -> float:
    if _COMMA_DECIMAL_RE.match(text):
        raise ParseError(
            f"value '{text}' uses ',' as decimal separator; use '.' instead", row=row
        )

    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"value '{text}' is not a number", row=row)

    if not math.isfinite(value):
        raise NonFiniteValueError(f"value '{text}' is not finite", row=row)

    return value
