"""Data-generating processes and their analytic moments.

Four designs are supported:

* :class:`LocationModel` -- ``y[t] = c + eps[t]`` with ``c = m**-0.5``, paired
  with a rolling mean against the zero forecast.
* :class:`ExpandingNull` -- ``y[t] = eps[t]``, paired with the expanding mean
  against ``t**-0.5``.
* :class:`NestedFixedRegressor` -- ``y[s+1] = c + beta * x[s] + sigma * eps[s+1]``
  with a fixed regressor path and ``c**2`` from :func:`compute_c_squared_nested`.
* :class:`NonNested` -- ``y[s+1] = b1 * x1[s] + b2 * x2[s] + eps[s+1]``.

Outcomes are indexed ``1..T``; regressor rows are indexed ``0..T-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from .errors import DomainError, RankDeficiencyError
from .rng import RandomStream
from .series import Series

__all__ = [
    "InnovationSpec",
    "InnovationMoments",
    "LocationModel",
    "ExpandingNull",
    "NestedFixedRegressor",
    "NonNested",
    "DgpSpec",
    "SimulatedPath",
    "default_regressor_path",
    "lognormal_neg_moments",
    "innovation_moments",
    "draw_innovations",
    "nested_c_squared_terms",
    "compute_c_squared_nested",
    "simulate",
]


@dataclass(frozen=True)
class InnovationSpec:
    """Unit-variance, zero-mean innovation law.

    ``gaussian_unit`` is N(0, 1). ``neg_standardized_lognormal`` draws
    ``log xi ~ N(0, sigma**2)`` and returns ``-(xi - E xi) / sd(xi)``, which is
    left-skewed for every ``sigma > 0``.
    """

    kind: Literal["gaussian_unit", "neg_standardized_lognormal"] = "gaussian_unit"
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind == "neg_standardized_lognormal":
            if not self.sigma > 0:
                raise DomainError(f"lognormal shape must be > 0, got {self.sigma}")
        elif self.kind != "gaussian_unit":
            raise DomainError(f"unknown innovation kind {self.kind!r}")

    @classmethod
    def lognormal(cls, sigma: float) -> "InnovationSpec":
        return cls("neg_standardized_lognormal", float(sigma))


@dataclass(frozen=True)
class InnovationMoments:
    kappa1: float  # E eps**3
    kappa2: float  # E eps**4

    def __post_init__(self):
        if self.kappa2 < 1 or self.kappa2 < self.kappa1 ** 2 + 1 - 1e-9 * self.kappa2:
            raise DomainError(
                f"inadmissible moments kappa1={self.kappa1}, kappa2={self.kappa2}"
            )


GAUSSIAN_MOMENTS = InnovationMoments(0.0, 3.0)


def lognormal_neg_moments(sigma: float) -> InnovationMoments:
    """Third and fourth moments of the negated standardized lognormal."""
    if not sigma > 0:
        raise DomainError(f"lognormal shape must be > 0, got {sigma}")
    s2 = sigma * sigma
    w = math.exp(s2)
    kappa1 = -(w + 2.0) * math.sqrt(math.expm1(s2))
    kappa2 = w ** 4 + 2.0 * w ** 3 + 3.0 * w ** 2 - 3.0
    return InnovationMoments(kappa1, kappa2)


def innovation_moments(spec: InnovationSpec) -> InnovationMoments:
    if spec.kind == "gaussian_unit":
        return GAUSSIAN_MOMENTS
    return lognormal_neg_moments(spec.sigma)


def _innovations(spec: InnovationSpec, size, rng: RandomStream) -> np.ndarray:
    z = rng.standard_normal(size)
    if spec.kind == "gaussian_unit":
        return z
    s = spec.sigma
    # -(exp(s z) - exp(s^2/2)) / sqrt((exp(s^2) - 1) exp(s^2)), rescaled by exp(-s^2/2)
    return -np.expm1(s * z - 0.5 * s * s) / math.sqrt(math.expm1(s * s))


def draw_innovations(spec: InnovationSpec, count: int, rng: RandomStream) -> Series:
    """``count`` i.i.d. innovations, indexed from 1."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return Series(_innovations(spec, count, rng), 1)


def default_regressor_path(length: int) -> np.ndarray:
    """``x[t] = sin(t) + 2`` for ``t = 0 .. length-1``."""
    return np.sin(np.arange(length, dtype=float)) + 2.0


def nested_c_squared_terms(x, m: int, n: int,
                           convention: Literal["forecast_point", "verbatim"] = "forecast_point"):
    """Bracketed sums of the intercept calibration for the nested design.

    For ``t = m+1 .. m+n`` the prefix ``x[0..t-1]`` is the estimation sample.
    Returns ``(numerator, denominator)`` with

    * numerator ``= sum_t q' (Z'Z)^-1 q - x[t]**2 / (x'x)`` where ``Z`` stacks
      rows ``(1, x[s])`` of the prefix, and
    * denominator ``= sum_t (1 - (x'1 / x'x) x[t])**2``.

    ``convention`` chooses ``q``: ``"forecast_point"`` uses ``(1, x[t])``, the
    regressor at the forecast origin, which makes the expected summed loss
    differential exactly zero; ``"verbatim"`` uses ``(1, x[t-1])``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if m < 1 or n < 1:
        raise DomainError("m and n must be >= 1")
    if x.size < m + n + 1:
        raise DomainError(f"regressor path needs {m + n + 1} values, got {x.size}")
    if convention not in ("forecast_point", "verbatim"):
        raise DomainError(f"unknown convention {convention!r}")
    num = den = 0.0
    for t in range(m + 1, m + n + 1):
        xs = x[:t]
        sxx = float(xs @ xs)
        sx = float(xs.sum())
        gram = np.array([[t, sx], [sx, sxx]])
        det = t * sxx - sx * sx
        if sxx <= 0 or det <= 1e-12 * max(t * sxx, 1.0):
            raise RankDeficiencyError(f"singular prefix design at t={t}", origin=t)
        q = np.array([1.0, x[t] if convention == "forecast_point" else x[t - 1]])
        lev = float(q @ np.linalg.solve(gram, q))
        num += lev - x[t] ** 2 / sxx
        den += (1.0 - sx / sxx * x[t]) ** 2
    return num, den


def compute_c_squared_nested(x, sigma_eps: float, m: int, n: int,
                             convention: Literal["forecast_point", "verbatim"] = "forecast_point") -> float:
    """Squared intercept that equalises the two models' expected summed loss.

    Raises :class:`DomainError` when the numerator is negative (no real
    intercept exists) or the denominator vanishes.
    """
    if not sigma_eps > 0:
        raise DomainError(f"sigma_eps must be > 0, got {sigma_eps}")
    num, den = nested_c_squared_terms(x, m, n, convention)
    if num < 0:
        raise DomainError(f"negative c^2 numerator {num:.6g}: no real intercept")
    if den <= 0:
        raise DomainError("c^2 denominator is zero")
    return sigma_eps ** 2 * num / den


@dataclass(frozen=True)
class LocationModel:
    m: int
    innovation: InnovationSpec = InnovationSpec()

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")

    @property
    def c(self) -> float:
        return self.m ** -0.5


@dataclass(frozen=True)
class ExpandingNull:
    m: int
    innovation: InnovationSpec = InnovationSpec()

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")


@dataclass(frozen=True)
class NestedFixedRegressor:
    """Nested design with fixed regressors ``(1, x[s])``.

    ``x`` defaults to :func:`default_regressor_path` of length ``m + n + 1``.
    The intercept is ``sqrt(c_squared)``; ``beta`` is the slope on ``x``.
    """

    m: int
    n: int
    sigma_eps: float = 1.0
    x: Optional[tuple] = None
    beta: float = 1.0
    innovation: InnovationSpec = InnovationSpec()
    c_squared: float = field(init=False)

    def __post_init__(self):
        path = default_regressor_path(self.m + self.n + 1) if self.x is None else self.x
        path = tuple(float(v) for v in path)
        object.__setattr__(self, "x", path)
        object.__setattr__(
            self, "c_squared",
            compute_c_squared_nested(path, self.sigma_eps, self.m, self.n),
        )

    @property
    def c(self) -> float:
        return math.sqrt(self.c_squared)


@dataclass(frozen=True)
class NonNested:
    m: int
    beta1: float = 1.0
    beta2: float = 1.0
    innovation: InnovationSpec = InnovationSpec()

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")


DgpSpec = Union[LocationModel, ExpandingNull, NestedFixedRegressor, NonNested]


@dataclass(frozen=True)
class SimulatedPath:
    """Outcomes ``y[1..T]``, innovations ``eps[1..T]`` and optional regressor
    rows ``X[0..T-1]`` (``x_start == 0``)."""

    y: Series
    eps: np.ndarray
    regressors: Optional[np.ndarray] = None
    x_start: int = 0


def simulate(dgp: DgpSpec, T: int, rng: RandomStream) -> SimulatedPath:
    """Draw one path of length ``T`` from ``dgp``."""
    if T < 2:
        raise DomainError(f"T must be >= 2, got {T}")
    if isinstance(dgp, (LocationModel, ExpandingNull, NonNested)) and T <= dgp.m:
        raise DomainError(f"T={T} must exceed the window m={dgp.m}")
    eps = _innovations(dgp.innovation, T, rng)
    if isinstance(dgp, LocationModel):
        return SimulatedPath(Series(dgp.c + eps, 1), eps)
    if isinstance(dgp, ExpandingNull):
        return SimulatedPath(Series(eps.copy(), 1), eps)
    if isinstance(dgp, NestedFixedRegressor):
        if T > len(dgp.x):
            raise DomainError(f"T={T} exceeds the fixed regressor path length {len(dgp.x)}")
        x = np.asarray(dgp.x[:T])
        X = np.column_stack([np.ones(T), x])
        y = dgp.c + dgp.beta * x + dgp.sigma_eps * eps
        return SimulatedPath(Series(y, 1), eps, X, 0)
    if isinstance(dgp, NonNested):
        X = rng.standard_normal((T, 2))
        y = dgp.beta1 * X[:, 0] + dgp.beta2 * X[:, 1] + eps
        return SimulatedPath(Series(y, 1), eps, X, 0)
    raise DomainError(f"unsupported DGP {type(dgp).__name__}")
