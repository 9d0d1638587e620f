"""Rolling- and expanding-window forecasts.

A forecast made at origin ``t`` sits in slot ``t`` of the returned
:class:`~predacc.series.Series` and targets the outcome ``y[t+1]``. Least
squares forecasters pair the regressor row ``X[s]`` with the outcome
``y[s+1]``; the regressor matrix carries its own time index of row 0
(``x_start``), defaulting to ``y.start_index``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DomainError, InsufficientDataError, RankDeficiencyError
from .series import Series, as_series

__all__ = [
    "WindowScheme",
    "rolling_mean_forecasts",
    "rolling_ols_forecasts",
    "expanding_mean_forecasts",
    "expanding_ols_forecasts",
    "deterministic_sequence_forecasts",
]

# Relative pivot size below which a window design is declared rank deficient.
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class WindowScheme:
    """Estimation scheme: fixed-width ``rolling`` window of ``m`` observations,
    or ``expanding`` window whose first forecast origin is ``m``."""

    kind: Literal["rolling", "expanding"]
    m: int

    def __post_init__(self):
        if self.kind not in ("rolling", "expanding"):
            raise DomainError(f"unknown window kind {self.kind!r}")
        if self.m < 1:
            raise DomainError(f"window length must be >= 1, got {self.m}")


def rolling_mean_forecasts(y, m: int) -> Series:
    """Mean of the ``m`` most recent outcomes, for origins ``start+m-1 .. end-1``."""
    y = as_series(y)
    if m < 1:
        raise DomainError(f"window length must be >= 1, got {m}")
    if m >= len(y):
        raise InsufficientDataError(f"need more than m={m} observations, got {len(y)}")
    csum = np.concatenate(([0.0], np.cumsum(y.values)))
    # windows ending at positions m-1 .. T-2 (0-based); the last one has no target
    means = (csum[m:-1] - csum[:-m - 1]) / m
    return Series(means, y.start_index + m - 1)


def expanding_mean_forecasts(y, m0: int) -> Series:
    """Mean of all outcomes to date, for origins ``m0 .. T-1`` (origin counts
    observations from the start of ``y``)."""
    y = as_series(y)
    if m0 < 1:
        raise DomainError(f"first origin must be >= 1, got {m0}")
    if m0 >= len(y):
        raise InsufficientDataError(f"need more than m0={m0} observations, got {len(y)}")
    counts = np.arange(1, len(y) + 1)
    means = np.cumsum(y.values) / counts
    return Series(means[m0 - 1:-1], y.start_index + m0 - 1)


def deterministic_sequence_forecasts(rule: str, origins: range, c: float = 0.0) -> Series:
    """Data-free benchmark forecasts: ``constant`` (value ``c``) or
    ``inverse_sqrt_t`` (``t**-0.5`` at origin ``t``)."""
    t = np.arange(origins.start, origins.stop, origins.step or 1, dtype=float)
    if t.size == 0:
        raise InsufficientDataError("empty origin range")
    if (origins.step or 1) != 1:
        raise DomainError("origins must be a contiguous range")
    if rule == "constant":
        vals = np.full(t.size, float(c))
    elif rule == "inverse_sqrt_t":
        if t[0] < 1:
            raise DomainError("inverse_sqrt_t needs origins t >= 1")
        vals = t ** -0.5
    else:
        raise DomainError(f"unknown rule {rule!r}")
    return Series(vals, origins.start)


def _design(y: Series, X, x_start):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise DomainError("regressor matrix must be 2-D with at least one row")
    if not np.all(np.isfinite(X)):
        raise DomainError("regressor matrix contains non-finite values")
    x_start = y.start_index if x_start is None else int(x_start)
    return X, x_start


def _pairs(y: Series, X: np.ndarray, x_start: int):
    """Aligned (X[s], y[s+1]) pairs plus the X rows usable as forecast origins."""
    first = max(x_start, y.start_index - 1)
    last = min(x_start + X.shape[0] - 1, y.end_index - 1)
    if last < first:
        raise InsufficientDataError("regressors and outcomes do not overlap")
    Xs = X[first - x_start:last - x_start + 1]
    ys = y.values[first + 1 - y.start_index:last + 2 - y.start_index]
    return first, Xs, ys


def rolling_ols_forecasts(y, X, m: int, x_start: int | None = None) -> Series:
    """Least-squares forecasts ``X[t] @ b_t`` where ``b_t`` regresses
    ``y[s+1]`` on ``X[s]`` over the ``m`` pairs ``s = t-m .. t-1``.

    Each window is solved by a Householder QR factorisation; a pivot smaller
    than ``1e-10`` times the window's largest pivot raises
    :class:`RankDeficiencyError` naming the origin.
    """
    y = as_series(y)
    X, x_start = _design(y, X, x_start)
    k = X.shape[1]
    if m < max(k, 1):
        raise DomainError(f"window m={m} smaller than the number of regressors {k}")
    first, Xs, ys = _pairs(y, X, x_start)
    n_orig = Xs.shape[0] - m
    if n_orig < 1:
        raise InsufficientDataError(
            f"window m={m} leaves no forecast origin with {Xs.shape[0]} aligned pairs"
        )
    Xw = sliding_window_view(Xs, (m, k))[:n_orig, 0]        # (n_orig, m, k)
    yw = sliding_window_view(ys, m)[:n_orig]                 # (n_orig, m)
    q, r = np.linalg.qr(Xw)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    scale = np.maximum(np.abs(Xw).max(axis=(1, 2)) * np.sqrt(m), np.finfo(float).tiny)
    bad = np.flatnonzero((diag <= _RANK_RTOL * scale[:, None]).any(axis=1))
    if bad.size:
        t = first + m + int(bad[0])
        raise RankDeficiencyError(f"singular estimation window at origin t={t}", origin=t)
    qty = np.einsum("nmk,nm->nk", q, yw)
    beta = np.linalg.solve(r, qty[..., None])[..., 0]
    fc = np.einsum("nk,nk->n", Xs[m:m + n_orig], beta)
    return Series(fc, first + m)


def expanding_ols_forecasts(y, X, m0: int, x_start: int | None = None) -> Series:
    """Least-squares forecasts using every pair available before the origin.

    The first origin is the one preceded by ``m0`` aligned pairs. Windows are
    solved from running Gram sums; an eigenvalue ratio below ``1e-12`` raises
    :class:`RankDeficiencyError`.
    """
    y = as_series(y)
    X, x_start = _design(y, X, x_start)
    k = X.shape[1]
    if m0 < max(k, 1):
        raise DomainError(f"first origin m0={m0} smaller than the number of regressors {k}")
    first, Xs, ys = _pairs(y, X, x_start)
    n_orig = Xs.shape[0] - m0
    if n_orig < 1:
        raise InsufficientDataError(
            f"m0={m0} leaves no forecast origin with {Xs.shape[0]} aligned pairs"
        )
    gram = np.cumsum(np.einsum("si,sj->sij", Xs, Xs), axis=0)[m0 - 1:-1]
    rhs = np.cumsum(Xs * ys[:, None], axis=0)[m0 - 1:-1]
    ev = np.linalg.eigvalsh(gram)
    bad = np.flatnonzero(ev[:, 0] <= 1e-12 * np.maximum(ev[:, -1], np.finfo(float).tiny))
    if bad.size:
        t = first + m0 + int(bad[0])
        raise RankDeficiencyError(f"singular estimation window at origin t={t}", origin=t)
    beta = np.linalg.solve(gram, rhs[..., None])[..., 0]
    fc = np.einsum("nk,nk->n", Xs[m0:], beta)
    return Series(fc, first + m0)
