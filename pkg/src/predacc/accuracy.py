"""Equal-predictive-accuracy tests on a loss-differential series.

All tests are two-sided and share one decision rule: reject at level
``alpha`` iff ``p_value < alpha``.

* :func:`gw_test` -- sum of differentials over the root of the sum of their
  squares (uncentred), referred to N(0, 1).
* :func:`dm_nw_test` -- studentized mean with a Bartlett-kernel long-run
  variance (centred autocovariances), referred to N(0, 1).
* :func:`subsample_t_test` -- t statistic of ``K`` contiguous block means,
  referred to Student-t with ``K - 1`` degrees of freedom.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .distributions import two_sided_p_value
from .errors import DegenerateStatisticError, DomainError, InsufficientDataError
from .series import LossDiffSeries, sample_autocovariance

__all__ = [
    "TestResult",
    "DEFAULT_LEVELS",
    "gw_test",
    "newey_west_lrv",
    "textbook_lags",
    "dm_nw_test",
    "subsample_t_test",
]

DEFAULT_LEVELS = (0.01, 0.05, 0.10)


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float
    reference: str
    p_value: float
    df: Optional[int] = None
    nw_lags: Optional[int] = None
    K: Optional[int] = None
    reject_at: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def rejects(self, alpha: float) -> bool:
        if not 0 < alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
        return self.p_value < alpha

    def as_dict(self) -> dict:
        return {
            "test": self.name,
            "statistic": self.statistic,
            "reference": self.reference if self.df is None else f"student_t({self.df})",
            "df": self.df,
            "p_value": self.p_value,
            "reject_at": {f"{a:g}": r for a, r in self.reject_at.items()},
            "nuisance": {"nw_lags": self.nw_lags, "K": self.K},
        }


def _result(name, stat, reference, df=None, levels=DEFAULT_LEVELS, **nuisance) -> TestResult:
    p = two_sided_p_value(stat, reference, df)
    return TestResult(name, float(stat), reference, p, df,
                      reject_at={a: p < a for a in levels}, **nuisance)


def _values(dl) -> np.ndarray:
    if isinstance(dl, LossDiffSeries):
        return dl.values
    return LossDiffSeries(dl).values


def gw_test(dl: Union[LossDiffSeries, np.ndarray], levels=DEFAULT_LEVELS) -> TestResult:
    x = _values(dl)
    if x.size < 2:
        raise InsufficientDataError(f"GW test needs n >= 2, got {x.size}")
    ss = float(np.dot(x, x))
    if ss == 0.0:
        raise DegenerateStatisticError("all loss differentials are zero (f1 == f2)")
    return _result("GW", x.sum() / math.sqrt(ss), "std_normal", levels=levels)


def newey_west_lrv(x, L: int) -> float:
    """Bartlett-kernel long-run variance ``g0 + 2 sum_j (1 - j/(L+1)) g_j``."""
    arr = np.asarray(getattr(x, "values", x), dtype=float)
    if not 0 <= L < arr.size:
        raise DomainError(f"lag count {L} outside [0, {arr.size - 1}]")
    lrv = sample_autocovariance(arr, 0)
    for j in range(1, L + 1):
        lrv += 2.0 * (1.0 - j / (L + 1)) * sample_autocovariance(arr, j)
    return max(lrv, 0.0)


def textbook_lags(n: int) -> int:
    """``0.75 n^(1/3)`` rounded half-up."""
    return int(math.floor(0.75 * float(np.cbrt(n)) + 0.5 + 1e-12))


def dm_nw_test(dl, lag_rule: Union[str, int] = "textbook", levels=DEFAULT_LEVELS) -> TestResult:
    """``lag_rule`` is ``"textbook"`` (uses :func:`textbook_lags` of ``n``)
    or an explicit non-negative lag count."""
    x = _values(dl)
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"DM test needs n >= 2, got {n}")
    if lag_rule == "textbook":
        L = textbook_lags(n)
    elif isinstance(lag_rule, (int, np.integer)) and not isinstance(lag_rule, bool):
        L = int(lag_rule)
    else:
        raise DomainError(f"lag_rule must be 'textbook' or an integer, got {lag_rule!r}")
    L = min(L, n - 1)
    lrv = newey_west_lrv(x, L)
    floor = (64 * np.finfo(float).eps) ** 2 * float(np.max(x * x))
    if lrv <= floor:
        raise DegenerateStatisticError("Newey-West long-run variance is zero")
    stat = math.sqrt(n) * x.mean() / math.sqrt(lrv)
    return _result("DM", stat, "std_normal", levels=levels, nw_lags=L)


def subsample_t_test(dl, K: int = 2, levels=DEFAULT_LEVELS) -> TestResult:
    """Blocks are contiguous; when ``K`` does not divide ``n`` the first
    ``n mod K`` blocks hold one extra observation."""
    x = _values(dl)
    if K < 2:
        raise DomainError(f"K must be >= 2, got {K}")
    if x.size < 2 * K:
        raise InsufficientDataError(f"subsample t-test needs n >= 2K = {2 * K}, got {x.size}")
    means = np.array([b.mean() for b in np.array_split(x, K)])
    grand = means.mean()
    sd = math.sqrt(float(np.sum((means - grand) ** 2)) / (K - 1))
    if sd <= 64 * np.finfo(float).eps * float(np.max(np.abs(means))):
        raise DegenerateStatisticError("block means are identical")
    return _result("SUB", math.sqrt(K) * grand / sd, "student_t", df=K - 1, levels=levels, K=K)
