"""Reference distributions for the test statistics."""
from __future__ import annotations

import math

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import DomainError

__all__ = ["normal_cdf", "student_t_cdf", "student_t_quantile", "two_sided_p_value"]

_SQRT2 = math.sqrt(2.0)


def normal_cdf(x):
    """Standard normal CDF, ``erfc(-x / sqrt 2) / 2``; accepts scalars or arrays."""
    out = 0.5 * special.erfc(-np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if np.ndim(out) == 0 else out


def _check_df(df):
    if not df >= 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df}")


def student_t_cdf(x, df):
    """Student-t CDF through the regularized incomplete beta function:
    ``P(T <= -|x|) = I_{df/(df+x^2)}(df/2, 1/2) / 2``."""
    _check_df(df)
    x = np.asarray(x, dtype=float)
    lower_tail = 0.5 * special.betainc(0.5 * df, 0.5, df / (df + x * x))
    out = np.where(x < 0, lower_tail, 1.0 - lower_tail)
    return float(out) if out.ndim == 0 else out


def student_t_quantile(p: float, df, xtol: float = 1e-12) -> float:
    """Solve ``student_t_cdf(q, df) = p`` by bracketing and Brent's method."""
    _check_df(df)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    target = p if p > 0.5 else 1.0 - p
    hi = 1.0
    while student_t_cdf(hi, df) < target:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError(f"quantile bracket overflow for p={p}, df={df}")
    q = brentq(lambda z: student_t_cdf(z, df) - target, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return q if p > 0.5 else -q


def two_sided_p_value(statistic: float, reference: str, df: int | None = None) -> float:
    a = abs(statistic)
    if reference == "std_normal":
        p = float(special.erfc(a / _SQRT2))
    elif reference == "student_t":
        _check_df(df)
        p = float(special.betainc(0.5 * df, 0.5, df / (df + a * a)))
    else:
        raise DomainError(f"unknown reference distribution {reference!r}")
    return float(min(max(p, 0.0), 1.0))
