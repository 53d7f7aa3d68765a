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
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .errors import DegenerateDistribution, DomainError, InsufficientData

# Hyndman & Fan type 7: linear interpolation at position p(n - 1) + 1.
QUARTILE_CONVENTION = "type-7"


@dataclass(frozen=True)
class DistributionSummary:
    """Cross-sectional diagnostics of a set of index values.

    ``skewness`` is the moment estimator g1 = m3 / m2^(3/2) and ``kurtosis`` is
    the non-excess beta2 = m4 / m2^2 (about 3 for a normal sample). Both, and
    ``cv``, are ``None`` when undefined: for constant input (m2 = 0), and for
    ``cv`` also when the mean is zero.
    """

    n: int
    mean: float
    std_dev: float
    skewness: Optional[float]
    kurtosis: Optional[float]
    cv: Optional[float]
    q1: float
    median: float
    q3: float

    @property
    def degenerate(self) -> bool:
        return self.skewness is None

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "mean": self.mean,
            "std_dev": self.std_dev,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "cv": self.cv,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "DistributionSummary":
        return DistributionSummary(**data)


def _as_array(values: Sequence[float], minimum: int) -> np.ndarray:
    data = np.asarray(values, dtype=float)
    if data.size < minimum:
        raise InsufficientData(f"need at least {minimum} values, got {data.size}")
    if not np.all(np.isfinite(data)):
        raise DomainError("values must be finite")
    return data


def _quartiles(data: np.ndarray) -> Tuple[float, float, float]:
    q1, median, q3 = np.quantile(data, [0.25, 0.5, 0.75], method="linear")
    return float(q1), float(median), float(q3)


def summarize(values: Sequence[float], strict: bool = False) -> DistributionSummary:
    """Summarize a cross-section of index values.

    Args:
        values: At least two finite values.
        strict: Raise instead of returning undefined markers for a
            degenerate (constant) sample.

    Returns:
        A :class:`DistributionSummary`. Quartiles use the type-7 convention.

    Raises:
        InsufficientData: fewer than two values.
        DegenerateDistribution: ``strict`` is set and the sample is constant.
    """
    data = _as_array(values, 2)
    q1, median, q3 = _quartiles(data)
    mean = float(np.mean(data))
    # Deviations from the median stay exact for tightly clustered samples.
    centred = data - median
    std_dev = float(np.std(centred, ddof=1))

    if np.ptp(data) == 0:
        if strict:
            raise DegenerateDistribution(
                "constant sample: skewness, kurtosis and cv are undefined"
            )
        logging.warning(
            f"Constant cross-section of {data.size} values; moment statistics "
            f"are undefined."
        )
        return DistributionSummary(
            n=int(data.size),
            mean=mean,
            std_dev=0.0,
            skewness=None,
            kurtosis=None,
            cv=None,
            q1=q1,
            median=median,
            q3=q3,
        )

    return DistributionSummary(
        n=int(data.size),
        mean=mean,
        std_dev=std_dev,
        skewness=float(stats.skew(centred, bias=True)),
        kurtosis=float(stats.kurtosis(centred, fisher=False, bias=True)),
        cv=std_dev / abs(mean) if mean != 0 else None,
        q1=q1,
        median=median,
        q3=q3,
    )


def quartile_bounds(values: Sequence[float]) -> Tuple[float, float]:
    """Get the lower and upper quartiles (type-7 convention).

    Raises:
        InsufficientData: fewer than four values.
    """
    q1, _, q3 = _quartiles(_as_array(values, 4))
    return q1, q3


def quartile_thresholds(values: Sequence[float]) -> Tuple[float, float, float]:
    """Get Q1, the median and Q3 of at least four values."""
    return _quartiles(_as_array(values, 4))
