"""Monte Carlo size experiments.

Every replication ``r`` of a cell draws from ``substream(master_seed, *cell_key, r)``
where the cell key is derived from the cell's own parameters, so results are
identical for any worker count and a cell gives the same numbers whether it is
run alone or inside a grid.

Each replication simulates ``T = m + n + 1`` outcomes, forms the DGP's pair of
forecasts and keeps the last ``n`` forecast origins (``m+1 .. m+n``), i.e. the
loss differentials of outcomes ``m+2 .. m+n+1``.

Config files
------------
:func:`load_grid_config` reads an INI file with an ``[experiment]`` section::

    [experiment]
    sigma = 0.5, 1, 1.5        ; lognormal shapes; "gaussian" for N(0,1)
    m = 3, 5, 10, 30
    n = 100, 200, 1000
    replications = 2000
    tests = GW, DM, SUB(2)
    alpha = 0.05
    seed = 7
    lag_rule = textbook        ; or an integer lag count
    workers = 1
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import accuracy
from .asymptotics import gamma_d, vm
from .dgp import (DgpSpec, ExpandingNull, InnovationSpec, LocationModel,
                  NestedFixedRegressor, NonNested, innovation_moments, simulate)
from .errors import DegenerateStatisticError, DomainError
from .forecasters import (deterministic_sequence_forecasts, expanding_mean_forecasts,
                          expanding_ols_forecasts, rolling_mean_forecasts,
                          rolling_ols_forecasts)
from .rng import substream
from .series import LossDiffSeries, loss_diff_squared_error, sample_autocovariance, targets_for

__all__ = [
    "ExperimentConfig",
    "TestSummary",
    "RejectionSummary",
    "Table1",
    "GridConfig",
    "parse_test",
    "mc_se",
    "loss_differential",
    "replicate",
    "run_experiment",
    "reproduce_table1",
    "jstat_variance_experiment",
    "acov_check_experiment",
    "summed_loss_experiment",
    "load_grid_config",
    "TABLE1_COLUMNS",
]

_SUB_RE = re.compile(r"^SUB\((\d+)\)$")
_CHUNK = 250


def parse_test(name: str) -> tuple:
    """``"GW"`` -> ``("GW", None)``, ``"SUB(2)"`` -> ``("SUB", 2)``."""
    key = name.strip().upper().replace(" ", "")
    if key in ("GW", "DM"):
        return key, None
    if key == "SUB":
        return "SUB", 2
    mt = _SUB_RE.match(key)
    if mt and int(mt.group(1)) >= 2:
        return "SUB", int(mt.group(1))
    raise DomainError(f"unknown test {name!r}; expected GW, DM or SUB(K) with K >= 2")


def _label(test: tuple) -> str:
    return test[0] if test[1] is None else f"SUB({test[1]})"


@dataclass(frozen=True)
class ExperimentConfig:
    dgp: DgpSpec
    n: int
    replications: int = 2000
    tests: tuple = ("GW", "DM", "SUB(2)")
    alpha: float = 0.05
    master_seed: int = 0
    lag_rule: Union[str, int] = "textbook"
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if self.n <= self.dgp.m:
            raise DomainError(f"n={self.n} must exceed m={self.dgp.m}")
        if isinstance(self.dgp, NestedFixedRegressor) and self.dgp.n != self.n:
            raise DomainError("nested DGP evaluation length must equal n")
        object.__setattr__(self, "tests", tuple(_label(parse_test(t)) for t in self.tests))

    @property
    def m(self) -> int:
        return self.dgp.m

    @property
    def sigma(self) -> Optional[float]:
        inn = self.dgp.innovation
        return inn.sigma if inn.kind == "neg_standardized_lognormal" else None

    def stream_key(self) -> tuple:
        codes = {LocationModel: 1, ExpandingNull: 2, NestedFixedRegressor: 3, NonNested: 4}
        sig = self.sigma
        return (codes[type(self.dgp)], 0 if sig is None else int(round(sig * 1_000_000)),
                self.m, self.n)


def mc_se(p: float, replications: int) -> float:
    """Binomial Monte Carlo standard error ``sqrt(p (1 - p) / R)``."""
    if replications < 1:
        raise DomainError("replications must be >= 1")
    return math.sqrt(p * (1.0 - p) / replications)


def loss_differential(dgp: DgpSpec, n: int, rng) -> LossDiffSeries:
    """Simulate one path and return the loss differentials of its last ``n`` origins.

    Forecast pairs (forecast 1 minus forecast 2 in the loss):

    * location model -- rolling mean of ``m`` outcomes vs. the zero forecast;
    * expanding null -- expanding mean vs. ``t**-0.5``;
    * nested -- expanding least squares on ``(1, x)`` vs. on ``x`` alone;
    * non-nested -- rolling least squares on ``x1`` vs. on ``x2``.
    """
    m = dgp.m
    path = simulate(dgp, m + n + 1, rng)
    y = path.y
    if isinstance(dgp, LocationModel):
        f1 = rolling_mean_forecasts(y, m)
        f2 = deterministic_sequence_forecasts("constant", range(f1.start_index, f1.end_index + 1))
    elif isinstance(dgp, ExpandingNull):
        f1 = expanding_mean_forecasts(y, m)
        f2 = deterministic_sequence_forecasts("inverse_sqrt_t", range(f1.start_index, f1.end_index + 1))
    elif isinstance(dgp, NestedFixedRegressor):
        X = path.regressors
        f1 = expanding_ols_forecasts(y, X, m, x_start=path.x_start)
        f2 = expanding_ols_forecasts(y, X[:, 1:], m, x_start=path.x_start)
    elif isinstance(dgp, NonNested):
        X = path.regressors
        f1 = rolling_ols_forecasts(y, X[:, :1], m, x_start=path.x_start)
        f2 = rolling_ols_forecasts(y, X[:, 1:], m, x_start=path.x_start)
    else:
        raise DomainError(f"unsupported DGP {type(dgp).__name__}")
    first = f1.end_index - n + 1
    f1 = f1.window(first, f1.end_index)
    f2 = f2.window(first, f2.end_index)
    return loss_diff_squared_error(targets_for(y, f1), f1, f2, m=m)


def _run_test(test: tuple, dl: LossDiffSeries, lag_rule):
    if test[0] == "GW":
        return accuracy.gw_test(dl, levels=())
    if test[0] == "DM":
        return accuracy.dm_nw_test(dl, lag_rule, levels=())
    return accuracy.subsample_t_test(dl, test[1], levels=())


@dataclass
class _Draws:
    statistics: np.ndarray   # (R, n_tests), NaN where degenerate
    p_values: np.ndarray     # (R, n_tests), NaN where degenerate
    loss_sums: np.ndarray    # (R,)


def _chunk(args) -> _Draws:
    config, start, stop = args
    tests = [parse_test(t) for t in config.tests]
    key = config.stream_key()
    stats = np.full((stop - start, len(tests)), np.nan)
    pv = np.full_like(stats, np.nan)
    sums = np.empty(stop - start)
    for i, r in enumerate(range(start, stop)):
        dl = loss_differential(config.dgp, config.n, substream(config.master_seed, *key, r))
        sums[i] = dl.values.sum()
        for j, test in enumerate(tests):
            try:
                res = _run_test(test, dl, config.lag_rule)
            except DegenerateStatisticError:
                continue
            stats[i, j] = res.statistic
            pv[i, j] = res.p_value
    return _Draws(stats, pv, sums)


def replicate(config: ExperimentConfig) -> _Draws:
    """Per-replication statistics, p-values and summed loss differentials,
    ordered by replication index."""
    R = config.replications
    jobs = [(config, s, min(s + _CHUNK, R)) for s in range(0, R, _CHUNK)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            parts = list(ex.map(_chunk, jobs))
    else:
        parts = [_chunk(j) for j in jobs]
    return _Draws(np.concatenate([p.statistics for p in parts]),
                  np.concatenate([p.p_values for p in parts]),
                  np.concatenate([p.loss_sums for p in parts]))


@dataclass(frozen=True)
class TestSummary:
    test: str
    rejection_rate: float
    mc_se: float
    rejections: int
    valid: int
    degenerate: int

    __test__ = False


@dataclass(frozen=True)
class RejectionSummary:
    sigma: Optional[float]
    m: int
    n: int
    replications: int
    alpha: float
    master_seed: int
    results: tuple  # of TestSummary, in config.tests order

    def __getitem__(self, test: str) -> TestSummary:
        key = _label(parse_test(test))
        for r in self.results:
            if r.test == key:
                return r
        raise KeyError(test)

    def rates(self) -> dict:
        return {r.test: r.rejection_rate for r in self.results}


def _summarize(config: ExperimentConfig, draws: _Draws) -> RejectionSummary:
    out = []
    for j, test in enumerate(config.tests):
        p = draws.p_values[:, j]
        ok = ~np.isnan(p)
        valid = int(ok.sum())
        rej = int(np.sum(p[ok] < config.alpha))
        rate = rej / valid if valid else float("nan")
        se = mc_se(rate, valid) if valid else float("nan")
        out.append(TestSummary(test, rate, se, rej, valid, config.replications - valid))
    return RejectionSummary(config.sigma, config.m, config.n, config.replications,
                            config.alpha, config.master_seed, tuple(out))


def run_experiment(config: ExperimentConfig) -> RejectionSummary:
    """Rejection frequencies of each requested test at ``config.alpha``.

    Degenerate statistics are excluded from a test's denominator and counted.
    """
    return _summarize(config, replicate(config))


TABLE1_COLUMNS = ("sigma", "m", "n", "test", "rejection_rate", "mc_se", "degenerate_count")


def _g17(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass(frozen=True)
class Table1:
    """Rejection summaries in row-major order: sigma blocks, then m rows, then n columns."""

    sigmas: tuple
    ms: tuple
    ns: tuple
    tests: tuple
    cells: tuple = field(repr=False)

    def cell(self, sigma, m: int, n: int) -> RejectionSummary:
        for c in self.cells:
            if c.m == m and c.n == n and (c.sigma == sigma or (c.sigma is None and sigma is None)):
                return c
        raise KeyError((sigma, m, n))

    def rows(self):
        for c in self.cells:
            for r in c.results:
                yield (c.sigma, c.m, c.n, r.test, r.rejection_rate, r.mc_se, r.degenerate)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE1_COLUMNS)
        for row in self.rows():
            w.writerow([_g17(row[0]) if row[0] is not None else "gaussian", row[1], row[2],
                        row[3], _g17(row[4]), _g17(row[5]), row[6]])
        return buf.getvalue()

    def format(self) -> str:
        """Console layout: one block per sigma, rows m, columns tests within n."""
        lines = []
        head = "m".rjust(4) + "".join(
            f"  {'n=' + str(n):^{8 * len(self.tests) + len(self.tests) - 1}}" for n in self.ns)
        sub = " " * 4 + "".join("  " + " ".join(f"{t:>8}" for t in self.tests) for _ in self.ns)
        for s in self.sigmas:
            lines.append(f"sigma = {s if s is not None else 'gaussian'}")
            lines += [head, sub]
            for m in self.ms:
                row = f"{m:>4}"
                for n in self.ns:
                    c = self.cell(s, m, n)
                    row += "  " + " ".join(f"{c[t].rejection_rate:8.4f}" for t in self.tests)
                lines.append(row)
            lines.append("")
        return "\n".join(lines)


def _innovation(sigma) -> InnovationSpec:
    return InnovationSpec() if sigma is None else InnovationSpec.lognormal(sigma)


def reproduce_table1(sigmas: Sequence, ms: Sequence[int], ns: Sequence[int],
                     replications: int = 2000, master_seed: int = 0,
                     tests: Sequence[str] = ("GW", "DM", "SUB(2)"), alpha: float = 0.05,
                     lag_rule="textbook", workers: int = 1) -> Table1:
    """Location-model size table; ``None`` in ``sigmas`` means Gaussian innovations."""
    cells = []
    for s in sigmas:
        for m in ms:
            for n in ns:
                cfg = ExperimentConfig(LocationModel(int(m), _innovation(s)), int(n), replications,
                                       tuple(tests), alpha, master_seed, lag_rule, workers)
                cells.append(run_experiment(cfg))
    labels = tuple(_label(parse_test(t)) for t in tests)
    return Table1(tuple(sigmas), tuple(int(m) for m in ms), tuple(int(n) for n in ns), labels, tuple(cells))


@dataclass(frozen=True)
class VarianceCheck:
    empirical_variance: float
    analytic: float
    ratio: float
    replications: int


def jstat_variance_experiment(config: ExperimentConfig) -> VarianceCheck:
    """Across-replication variance of the GW statistic against ``V_m``."""
    if not isinstance(config.dgp, LocationModel):
        raise DomainError("variance experiment needs the location model")
    cfg = replace(config, tests=("GW",))
    j = replicate(cfg).statistics[:, 0]
    j = j[~np.isnan(j)]
    mom = innovation_moments(config.dgp.innovation)
    v = vm(config.m, mom.kappa1, mom.kappa2)
    emp = float(np.var(j, ddof=1))
    return VarianceCheck(emp, v, emp / v, int(j.size))


@dataclass(frozen=True)
class LagCheck:
    lag: int
    empirical: float
    analytic: float
    se: float
    z: float


def acov_check_experiment(config: ExperimentConfig, max_lag: int, batches: int = 1) -> list:
    """Empirical loss-differential autocovariances against ``gamma_d``.

    Each replication's full series gives ``gamma_hat_d``; the reported value
    is their mean. The standard error comes from the spread of
    ``gamma_hat_d`` over ``replications * batches`` contiguous batches.
    """
    if not isinstance(config.dgp, LocationModel):
        raise DomainError("autocovariance check needs the location model")
    R, B = config.replications, batches
    if R * B < 2:
        raise DomainError("need at least two replications or batches for a standard error")
    if config.n // B <= max_lag:
        raise DomainError("batches too short for the requested lags")
    full = np.empty((R, max_lag + 1))
    parts = np.empty((R * B, max_lag + 1))
    for r in range(R):
        dl = loss_differential(config.dgp, config.n,
                               substream(config.master_seed, *config.stream_key(), r)).values
        for d in range(max_lag + 1):
            full[r, d] = sample_autocovariance(dl, d)
        for b, chunk in enumerate(np.array_split(dl, B)):
            for d in range(max_lag + 1):
                parts[r * B + b, d] = sample_autocovariance(chunk, d)
    mom = innovation_moments(config.dgp.innovation)
    out = []
    for d in range(max_lag + 1):
        emp = float(full[:, d].mean())
        se = float(parts[:, d].std(ddof=1) / math.sqrt(R * B))
        an = gamma_d(config.m, d, mom.kappa1, mom.kappa2, config.dgp.c)
        out.append(LagCheck(d, emp, an, se, (emp - an) / se if se > 0 else float("inf")))
    return out


@dataclass(frozen=True)
class MeanCheck:
    mean: float
    se: float
    z: float
    replications: int


def summed_loss_experiment(config: ExperimentConfig) -> MeanCheck:
    """Mean over replications of the summed loss differential, with its MC standard error."""
    s = replicate(replace(config, tests=())).loss_sums
    se = float(s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else float("nan")
    mean = float(s.mean())
    return MeanCheck(mean, se, mean / se if se and se > 0 else float("nan"), int(s.size))


@dataclass(frozen=True)
class GridConfig:
    sigmas: tuple
    ms: tuple
    ns: tuple
    replications: int = 2000
    tests: tuple = ("GW", "DM", "SUB(2)")
    alpha: float = 0.05
    seed: Optional[int] = None
    lag_rule: Union[str, int] = "textbook"
    workers: int = 1


def _parse_sigma(tok: str):
    tok = tok.strip().lower()
    if tok in ("gaussian", "normal", "none"):
        return None
    v = float(tok)
    if not v > 0:
        raise DomainError(f"sigma must be > 0, got {tok}")
    return v


def _split(v: str):
    return [t for t in (s.strip() for s in re.split(r"[,\s]+", v)) if t]


def parse_lag_rule(v: str):
    v = str(v).strip().lower()
    if v == "textbook":
        return "textbook"
    try:
        L = int(v)
    except ValueError:
        raise DomainError(f"lag rule must be 'textbook' or an integer, got {v!r}") from None
    if L < 0:
        raise DomainError("lag count must be >= 0")
    return L


def load_grid_config(text: str) -> GridConfig:
    """Parse the INI text of a grid config (see module docstring)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DomainError(f"malformed config: {exc}") from None
    if not cp.has_section("experiment"):
        raise DomainError("config needs an [experiment] section")
    sec = cp["experiment"]
    known = {"sigma", "m", "n", "replications", "tests", "alpha", "seed", "lag_rule", "workers"}
    unknown = set(sec) - known
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        tests = tuple(_split(sec.get("tests", "GW, DM, SUB(2)")))
        for t in tests:
            parse_test(t)
        grid = GridConfig(
            sigmas=tuple(_parse_sigma(s) for s in _split(sec.get("sigma", "0.5, 1, 1.5"))),
            ms=tuple(int(v) for v in _split(sec.get("m", "3, 5, 10, 30"))),
            ns=tuple(int(v) for v in _split(sec.get("n", "100, 200, 1000"))),
            replications=sec.getint("replications", 2000),
            tests=tests,
            alpha=sec.getfloat("alpha", 0.05),
            seed=sec.getint("seed") if "seed" in sec else None,
            lag_rule=parse_lag_rule(sec.get("lag_rule", "textbook")),
            workers=sec.getint("workers", 1),
        )
    except ValueError as exc:
        raise DomainError(f"invalid config value: {exc}") from None
    validate_grid(grid)
    return grid


def validate_grid(grid: GridConfig) -> None:
    if not grid.sigmas or not grid.ms or not grid.ns:
        raise DomainError("sigma, m and n lists must be non-empty")
    if any(m < 1 for m in grid.ms):
        raise DomainError("every m must be >= 1")
    if any(n <= max(grid.ms) for n in grid.ns):
        raise DomainError("every n must exceed every m")
    if grid.replications < 1:
        raise DomainError("replications must be >= 1")
    if not 0 < grid.alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if grid.workers < 1:
        raise DomainError("workers must be >= 1")
    if grid.seed is not None and grid.seed < 0:
        raise DomainError("seed must be non-negative")
