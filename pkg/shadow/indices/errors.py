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

from typing import Optional, Tuple


class ShadowError(Exception):
    """Base class of every error raised by the ``shadow`` package."""


class ConfigurationError(ShadowError):
    """A run configuration, registry, or threshold file is unusable."""


class DataError(ShadowError):
    """Source data could not be loaded or failed validation."""


class ComputationError(ShadowError):
    """An index could not be computed from otherwise valid data."""


class ParseError(DataError, ValueError):
    """A row in a source file is malformed.

    Attributes:
        row: 1-based row number in the source file (the CSV header is row 1),
            or ``None`` when the error is not tied to a single row.
    """

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class NonFiniteValueError(ParseError):
    """A value column holds NaN or an infinity."""


class DuplicateKeyError(DataError):
    """Two rows share the same (region, indicator, period) key."""

    def __init__(self, key: Tuple[str, str, object], first_row: int, second_row: int):
        self.key = key
        self.rows = (first_row, second_row)
        region, indicator, period = key
        super().__init__(
            f"duplicate observation ({region}, {indicator}, {period}) "
            f"in rows {first_row} and {second_row}"
        )


class UnknownIndicatorError(DataError):
    """An indicator id is not part of the registered vocabulary."""

    def __init__(self, indicator_id: str, row: Optional[int] = None):
        self.indicator_id = indicator_id
        self.row = row
        location = f"row {row}: " if row is not None else ""
        super().__init__(f"{location}unknown indicator '{indicator_id}'")


class DatasetValidationError(DataError):
    """Raised by the pipeline when a validation report carries errors."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"dataset failed validation with {len(report.errors)} error(s)"
        )


class DivisionByZero(ComputationError, ZeroDivisionError):
    pass


class DomainError(ComputationError, ValueError):
    """An input lies outside the domain of an operation (e.g. non-finite)."""


class NonPositiveValue(ComputationError, ValueError):
    """A value that must be strictly positive is zero or negative.

    Attributes:
        definition_id: The sub-index (or region) the offending value belongs to.
        value: The offending value.
    """

    def __init__(self, definition_id: str, value: float):
        self.definition_id = definition_id
        self.value = value
        super().__init__(f"'{definition_id}' has non-positive value {value!r}")


class MissingObservation(ComputationError, LookupError):
    """A (region, indicator, period) triple needed by a computation is absent."""

    def __init__(self, region_code: str, indicator_id: str, period):
        self.key = (region_code, indicator_id, period)
        super().__init__(
            f"missing observation ({region_code}, {indicator_id}, {period})"
        )

    def __str__(self) -> str:
        # LookupError would otherwise repr() the message.
        return self.args[0]


class NationalBaselineMissing(MissingObservation):
    """The national ("RU") rows required for normalization are absent."""


class ArityError(ComputationError, ValueError):
    pass


class MixedKeyError(ComputationError, ValueError):
    """Inputs to an aggregation refer to different regions or periods."""


class EmptyGroup(ComputationError, ValueError):
    pass


class MissingWeight(ComputationError, LookupError):
    def __str__(self) -> str:
        return self.args[0]


class InsufficientData(ComputationError, ValueError):
    pass


class ZeroVariance(ComputationError, ValueError):
    pass


class DegenerateDistribution(ComputationError, ValueError):
    """The second central moment of a sample is zero."""


class MissingFeature(ComputationError, LookupError):
    def __str__(self) -> str:
        return self.args[0]


class ComputationStageError(ComputationError):
    """A computation error re-raised with the pipeline stage it came from.

    The original error is available as ``__cause__``.
    """

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"{stage}: {cause}")


class OutputError(ShadowError, OSError):
    """A report or diagram could not be written.

    Attributes:
        path: The destination that failed.
    """

    def __init__(self, path: str, cause: OSError):
        self.path = path
        super().__init__(f"cannot write '{path}': {cause.strerror or cause}")
