"""Time-series containers, squared-error loss differentials and basic
empirical statistics.

Time indexing convention
------------------------
Every :class:`Series` carries the integer time index of its first element.
Outcomes are usually indexed ``1..T``. A forecast produced at origin ``t``
occupies slot ``t`` of its series and is paired with the outcome ``y[t+1]``;
:func:`targets_for` performs that pairing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AlignmentError, DomainError

__all__ = [
    "Series",
    "LossDiffSeries",
    "as_series",
    "targets_for",
    "loss_diff_squared_error",
    "sample_autocovariance",
    "empirical_quantile",
]


def _finite_array(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError(f"{what} must contain at least one element")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise DomainError(f"{what} has a non-finite value at position {bad}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Series:
    """Ordered, finite, non-empty sequence of observations.

    Parameters
    ----------
    values : array_like
        Observations; copied and frozen on construction.
    start_index : int
        Time index of ``values[0]``.
    """

    values: np.ndarray
    start_index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "values", _finite_array(self.values, "series"))
        object.__setattr__(self, "start_index", int(self.start_index))

    def __len__(self) -> int:
        return self.values.size

    @property
    def end_index(self) -> int:
        """Time index of the last element (inclusive)."""
        return self.start_index + self.values.size - 1

    def at(self, t: int) -> float:
        return float(self.values[t - self.start_index])

    def window(self, first: int, last: int) -> "Series":
        """Sub-series covering time indices ``first..last`` inclusive."""
        if first < self.start_index or last > self.end_index or last < first:
            raise DomainError(
                f"window [{first}, {last}] outside series range "
                f"[{self.start_index}, {self.end_index}]"
            )
        lo = first - self.start_index
        return Series(self.values[lo:lo + last - first + 1], first)


def as_series(x, start_index: int = 1) -> Series:
    """Coerce ``x`` (a Series or array-like) into a :class:`Series`."""
    if isinstance(x, Series):
        return x
    return Series(x, start_index)


@dataclass(frozen=True)
class LossDiffSeries:
    """Loss differentials over the evaluation sample.

    ``values[i]`` is the loss of forecast 1 minus the loss of forecast 2 for
    the ``i``-th evaluated outcome. ``m`` is the estimation window length and
    is kept as metadata only; ``n`` equals ``len(values)``.
    """

    values: np.ndarray
    m: int = 0
    loss: str = "squared_error"
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _finite_array(self.values, "loss differential"))
        object.__setattr__(self, "n", self.values.size)
        if self.loss != "squared_error":
            raise DomainError(f"unsupported loss {self.loss!r}")

    def __len__(self) -> int:
        return self.n

    def scaled(self, factor: float) -> "LossDiffSeries":
        return LossDiffSeries(self.values * factor, self.m, self.loss)


def targets_for(y: Series, forecasts: Series) -> Series:
    """Outcomes ``y[t+1]`` paired with each forecast origin ``t``."""
    first = forecasts.start_index + 1
    last = forecasts.end_index + 1
    if first < y.start_index or last > y.end_index:
        raise AlignmentError(
            f"forecast origins {forecasts.start_index}..{forecasts.end_index} need "
            f"outcomes {first}..{last}, available {y.start_index}..{y.end_index}"
        )
    return y.window(first, last)


def loss_diff_squared_error(y, f1, f2, m: int = 0) -> LossDiffSeries:
    """Element-wise ``(y - f1)**2 - (y - f2)**2``.

    The three inputs must already be aligned (element ``i`` of ``f1`` and
    ``f2`` forecasts element ``i`` of ``y``); only their lengths are checked.
    """
    ya, a, b = (_finite_array(getattr(s, "values", s), name)
                for s, name in ((y, "y"), (f1, "f1"), (f2, "f2")))
    if not (ya.size == a.size == b.size):
        raise AlignmentError(
            f"length mismatch: y={ya.size}, f1={a.size}, f2={b.size}"
        )
    return LossDiffSeries((ya - a) ** 2 - (ya - b) ** 2, m=m)


def sample_autocovariance(x, d: int) -> float:
    """Biased sample autocovariance at lag ``d`` (divisor ``n``, not ``n - d``)."""
    arr = _finite_array(getattr(x, "values", x), "x")
    n = arr.size
    if not 0 <= d < n:
        raise DomainError(f"lag {d} outside [0, {n - 1}]")
    c = arr - arr.mean()
    return float(np.dot(c[d:], c[:n - d]) / n)


def empirical_quantile(sample: Sequence[float], p: float) -> float:
    """Quantile by linear interpolation between order statistics.

    The ``k``-th smallest of ``N`` values (0-based) sits at probability
    ``k / (N - 1)``; ``p`` is located on that grid and the two neighbouring
    order statistics are interpolated linearly. A single value is returned
    as-is for every ``p``.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    arr = np.sort(np.asarray(sample, dtype=float).reshape(-1))
    if arr.size == 0:
        raise DomainError("empirical_quantile of an empty sample")
    if arr.size == 1:
        return float(arr[0])
    h = (arr.size - 1) * p
    lo = int(np.floor(h))
    hi = min(lo + 1, arr.size - 1)
    return float(arr[lo] + (h - lo) * (arr[hi] - arr[lo]))
