"""Closed-form asymptotics of the GW statistic in the rolling location model
and simulation of its expanding-window limiting functional.

Rolling location model
----------------------
With ``y[t+1] = c + eps[t+1]``, the rolling mean of the last ``m`` outcomes
against the zero forecast gives a loss differential whose autocovariances are
``gamma_d`` (zero beyond lag ``m``), long-run variance ``Gamma_inf`` and a GW
statistic with asymptotic variance ``V_m = Gamma_inf / gamma_0``.

Expanding-window functional
---------------------------
For a standard Brownian motion ``B`` and ``g(u) = u**-0.5 - B(u)/u``::

    first  = int_lam^1 (B(u)**2/u**2 - 1/u) du / (2 sqrt(D))
    second = int_lam^1 g(u) dB(u) / sqrt(D),      D = int_lam^1 g(u)**2 du
    draw   = first - second

Paths are discretised on ``k/N``; the ``du`` integrals are left-endpoint
Riemann sums over grid points ``ceil(lam N)/N .. (N-1)/N``. The stochastic
integral is ``sum g(u_j) (B(u_{k+1}) - B(u_k))`` with ``u_j = u_k``
(``endpoint="left"``, Ito) or ``u_j = u_{k+1}`` (``endpoint="right"``). The
two choices differ in the limit by ``int_lam^1 du/u = -log(lam)`` in the
stochastic integral; the quantile table :func:`table2_row` reproduces is the
right-endpoint one, so that is its default.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError
from .rng import substream
from .series import empirical_quantile

__all__ = [
    "vm",
    "gamma_d",
    "long_run_variance_analytic",
    "LimitSample",
    "Table2Row",
    "expanding_limit_functional",
    "simulate_expanding_limit",
    "table2_row",
    "TABLE2_CRITICAL",
]

TABLE2_CRITICAL = 1.96

Endpoint = Literal["left", "right"]


def vm(m: float, kappa1: float, kappa2: float) -> float:
    """Asymptotic variance of the GW statistic under the calibrated null
    (``c = m**-0.5``)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if kappa2 < 1:
        raise DomainError(f"kappa2 must be >= 1, got {kappa2}")
    den = 8.0 * m * m + kappa2 - 1.0
    if den <= 0:
        raise DomainError("non-positive denominator")
    return (4.0 * m * m - 4.0 * m ** 1.5 * kappa1 + m * (kappa2 + 3.0)) / den


def gamma_d(m: int, d: int, kappa1: float, kappa2: float, c: float) -> float:
    """Lag-``d`` autocovariance of the rolling location-model loss differential."""
    if m < 1 or d < 0:
        raise DomainError(f"need m >= 1 and d >= 0, got m={m}, d={d}")
    if d == 0:
        return (kappa2 - 1.0) / m ** 3 + 8.0 / m
    if d < m:
        return ((kappa2 - 1.0) / m ** 4 - 4.0 / m ** 3) * (m - d) - 2.0 * c * kappa1 / m ** 2
    if d == m:
        return -2.0 * c * kappa1 / m ** 2 + 0.0
    return 0.0


def long_run_variance_analytic(m: int, kappa1: float, kappa2: float, c: float) -> float:
    """``gamma_0 + 2 sum_d gamma_d`` in closed form."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return 4.0 / m - 4.0 * c * kappa1 / m + (kappa2 + 3.0) / m ** 2


@dataclass(frozen=True)
class LimitSample:
    draws: np.ndarray
    first_term: np.ndarray
    second_term: np.ndarray
    lam: float
    grid_steps: int
    paths: int
    endpoint: str


@dataclass(frozen=True)
class Table2Row:
    lam: float
    q95_abs: float
    size_at_196: float
    paths: int
    grid_steps: int
    endpoint: str


def _check_limit_args(lam, grid_steps, paths, endpoint):
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    if grid_steps < 100:
        raise DomainError(f"grid_steps must be >= 100, got {grid_steps}")
    if paths < 1:
        raise DomainError(f"paths must be >= 1, got {paths}")
    if endpoint not in ("left", "right"):
        raise DomainError(f"endpoint must be 'left' or 'right', got {endpoint!r}")


def expanding_limit_functional(increments: np.ndarray, lam: float, endpoint: Endpoint = "left"):
    """First and second terms of the functional for each row of Brownian
    increments ``B((k+1)/N) - B(k/N)``, shape ``(paths, N)``."""
    dB = np.atleast_2d(np.asarray(increments, dtype=float))
    N = dB.shape[1]
    _check_limit_args(lam, N, dB.shape[0], endpoint)
    k0 = math.ceil(lam * N - 1e-9)
    B = np.cumsum(dB, axis=1)                     # B[:, k-1] = B(k/N)
    u = np.arange(k0, N) / N
    Bu = B[:, k0 - 1:N - 1]
    g = u ** -0.5 - Bu / u
    int_sq = np.sum(Bu * Bu / (u * u) - 1.0 / u, axis=1) / N
    D = np.sum(g * g, axis=1) / N
    if endpoint == "left":
        stoch = np.sum(g * dB[:, k0:], axis=1)
    else:
        u1 = np.arange(k0 + 1, N + 1) / N
        stoch = np.sum((u1 ** -0.5 - B[:, k0:] / u1) * dB[:, k0:], axis=1)
    root = np.sqrt(D)
    return int_sq / (2.0 * root), stoch / root


def _limit_chunk(args):
    lam, N, seed, start, stop, endpoint = args
    dB = np.empty((stop - start, N))
    scale = 1.0 / math.sqrt(N)
    for i, p in enumerate(range(start, stop)):
        dB[i] = substream(seed, p).standard_normal(N) * scale
    return expanding_limit_functional(dB, lam, endpoint)


def simulate_expanding_limit(lam: float, grid_steps: int = 20_000, paths: int = 10_000,
                             seed: int = 0, endpoint: Endpoint = "left",
                             workers: int = 1, chunk: int = 250) -> LimitSample:
    """Draw ``paths`` realisations of the functional.

    Path ``p`` uses its own substream ``(seed, p)``, so the sample does not
    depend on ``workers`` or ``chunk``.
    """
    _check_limit_args(lam, grid_steps, paths, endpoint)
    jobs = [(lam, grid_steps, seed, s, min(s + chunk, paths), endpoint)
            for s in range(0, paths, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_limit_chunk, jobs))
    else:
        parts = [_limit_chunk(j) for j in jobs]
    first = np.concatenate([p[0] for p in parts])
    second = np.concatenate([p[1] for p in parts])
    return LimitSample(first - second, first, second, lam, grid_steps, paths, endpoint)


def table2_row(lam: float, grid_steps: int = 20_000, paths: int = 10_000, seed: int = 0,
               endpoint: Endpoint = "right", workers: int = 1) -> Table2Row:
    """95% quantile of ``|draw|`` and the rejection rate of the 1.96 cut-off."""
    sample = simulate_expanding_limit(lam, grid_steps, paths, seed, endpoint, workers)
    a = np.abs(sample.draws)
    return Table2Row(lam, empirical_quantile(a, 0.95), float(np.mean(a > TABLE2_CRITICAL)),
                     paths, grid_steps, endpoint)
