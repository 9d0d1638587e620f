"""Command-line front end.

Commands
--------
``evaluate FILE``   run GW / DM / SUB tests on a CSV with columns y, f1, f2
``table1``          location-model size table (config file and/or flags)
``table2``          quantiles of the expanding-window limiting functional
``vm``              closed-form V_m, autocovariances and long-run variance

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .accuracy import dm_nw_test, gw_test, subsample_t_test
from .asymptotics import gamma_d, long_run_variance_analytic, table2_row, vm
from .dgp import GAUSSIAN_MOMENTS, InnovationMoments, lognormal_neg_moments
from .errors import DegenerateStatisticError, PredaccError
from .harness import (GridConfig, load_grid_config, parse_lag_rule, parse_test,
                      reproduce_table1, validate_grid)
from .series import loss_diff_squared_error

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 1, 2, 3
MIN_ROWS = 10


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- evaluate

def read_evaluation_csv(path) -> tuple:
    """Read ``y, f1, f2`` columns (any order) from a comma-separated file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("empty file: header row y,f1,f2 required") from None
    if sorted(header) != ["f1", "f2", "y"]:
        raise DataError(f"header must name exactly y, f1, f2; got {','.join(header)}")
    cols = {name: [] for name in header}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise DataError(f"line {lineno}: expected 3 fields, got {len(row)}")
        for name, cell in zip(header, row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"line {lineno}, column {name}: non-numeric value {cell.strip()!r}") from None
            if not math.isfinite(v):
                raise DataError(f"line {lineno}, column {name}: non-finite value {cell.strip()!r}")
            cols[name].append(v)
    n = len(cols["y"])
    if n < MIN_ROWS:
        raise DataError(f"insufficient data: {n} rows, at least {MIN_ROWS} required")
    return np.array(cols["y"]), np.array(cols["f1"]), np.array(cols["f2"])


def evaluate(y, f1, f2, tests=("GW", "DM", "SUB"), alpha=0.05, K=2, lag_rule="textbook") -> dict:
    """Run the requested tests; degenerate tests are reported, not raised."""
    dl = loss_diff_squared_error(y, f1, f2)
    levels = (alpha,)
    report = {"n": dl.n, "mean_loss_differential": float(dl.values.mean()),
              "alpha": alpha, "results": []}
    for name in tests:
        kind, _ = parse_test(name)
        try:
            if kind == "GW":
                res = gw_test(dl, levels)
            elif kind == "DM":
                res = dm_nw_test(dl, lag_rule, levels)
            else:
                res = subsample_t_test(dl, K, levels)
        except DegenerateStatisticError as exc:
            report["results"].append({"test": kind, "degenerate": True, "message": str(exc)})
            continue
        entry = res.as_dict()
        entry["degenerate"] = False
        entry["reject"] = res.rejects(alpha)
        report["results"].append(entry)
    return report


def _format_evaluation(rep: dict) -> str:
    lines = [f"n = {rep['n']}   mean loss differential = {rep['mean_loss_differential']:.6g}"
             f"   alpha = {rep['alpha']:g}",
             f"{'test':<6}{'statistic':>12}{'reference':>14}{'p-value':>12}{'decision':>12}  nuisance"]
    for r in rep["results"]:
        if r["degenerate"]:
            lines.append(f"{r['test']:<6}{'degenerate: ' + r['message']:>50}")
            continue
        nz = r["nuisance"]
        nuis = f"lags={nz['nw_lags']}" if nz["nw_lags"] is not None else (
            f"K={nz['K']}" if nz["K"] is not None else "-")
        lines.append(f"{r['test']:<6}{r['statistic']:>12.4f}{r['reference']:>14}{r['p_value']:>12.4g}"
                     f"{'reject' if r['reject'] else 'accept':>12}  {nuis}")
    return "\n".join(lines) + "\n"


def cmd_evaluate(args) -> int:
    y, f1, f2 = read_evaluation_csv(args.file)
    tests = [t for t in (s.strip() for s in args.tests.split(",")) if t]
    if not tests:
        raise UsageError("--tests must name at least one test")
    for t in tests:
        try:
            parse_test(t)
        except PredaccError as exc:
            raise UsageError(str(exc)) from None
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    if args.K < 2:
        raise UsageError("--K must be >= 2")
    try:
        lag_rule = parse_lag_rule(args.lags)
    except PredaccError as exc:
        raise UsageError(str(exc)) from None
    if 2 * args.K > len(y) and any(parse_test(t)[0] == "SUB" for t in tests):
        raise DataError(f"insufficient data: subsample test needs n >= 2K = {2 * args.K}")
    rep = evaluate(y, f1, f2, tests, args.alpha, args.K, lag_rule)
    text = json.dumps(rep, indent=2) + "\n" if args.json else _format_evaluation(rep)
    _emit(text, args.out)
    return EXIT_DEGENERATE if any(r["degenerate"] for r in rep["results"]) else EXIT_OK


# ------------------------------------------------------------------ table1

def _grid_from_args(args) -> GridConfig:
    base = GridConfig(sigmas=(0.5, 1.0, 1.5), ms=(3, 5, 10, 30), ns=(100, 200, 1000))
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read {args.config}: {exc.strerror}") from None
        try:
            base = load_grid_config(text)
        except PredaccError as exc:
            raise UsageError(str(exc)) from None
    upd = dict(base.__dict__)
    try:
        if args.sigma:
            upd["sigmas"] = tuple(None if s.lower() == "gaussian" else float(s) for s in args.sigma)
        if args.m:
            upd["ms"] = tuple(args.m)
        if args.n:
            upd["ns"] = tuple(args.n)
        if args.tests:
            upd["tests"] = tuple(t.strip() for t in args.tests.split(",") if t.strip())
            for t in upd["tests"]:
                parse_test(t)
        if args.lags is not None:
            upd["lag_rule"] = parse_lag_rule(args.lags)
    except (ValueError, PredaccError) as exc:
        raise UsageError(str(exc)) from None
    for k, v in (("replications", args.reps), ("alpha", args.alpha),
                 ("seed", args.seed), ("workers", args.workers)):
        if v is not None:
            upd[k] = v
    grid = GridConfig(**upd)
    if any(s is not None and not s > 0 for s in grid.sigmas):
        raise UsageError("sigma values must be > 0 (or 'gaussian')")
    try:
        validate_grid(grid)
    except PredaccError as exc:
        raise UsageError(str(exc)) from None
    if grid.seed is None:
        raise UsageError("--seed is required (or set seed in the config file)")
    return grid


def cmd_table1(args) -> int:
    grid = _grid_from_args(args)
    table = reproduce_table1(grid.sigmas, grid.ms, grid.ns, grid.replications, grid.seed,
                             grid.tests, grid.alpha, grid.lag_rule, grid.workers)
    csv_text = table.to_csv()
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    if args.json:
        rows = [dict(zip(("sigma", "m", "n", "test", "rejection_rate", "mc_se", "degenerate_count"), r))
                for r in table.rows()]
        sys.stdout.write(json.dumps({"replications": grid.replications, "seed": grid.seed,
                                     "alpha": grid.alpha, "cells": rows}, indent=2) + "\n")
    elif args.out:
        sys.stdout.write(table.format() + "\n")
    else:
        sys.stdout.write(table.format() + "\n" + csv_text)
    degenerate = sum(r[6] for r in table.rows())
    return EXIT_DEGENERATE if degenerate else EXIT_OK


# ------------------------------------------------------------------ table2

def cmd_table2(args) -> int:
    if not args.lambdas:
        raise UsageError("--lambda needs at least one value")
    if any(not 0 < lam < 1 for lam in args.lambdas):
        raise UsageError("lambda values must lie in (0, 1)")
    if args.paths < 1 or args.grid < 100:
        raise UsageError("--paths must be >= 1 and --grid >= 100")
    rows = [table2_row(lam, args.grid, args.paths, args.seed, args.endpoint, args.workers)
            for lam in args.lambdas]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("lambda", "q95_abs", "size_at_196"))
    for r in rows:
        w.writerow((_g17(r.lam), _g17(r.q95_abs), _g17(r.size_at_196)))
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    if args.json:
        sys.stdout.write(json.dumps({"paths": args.paths, "grid_steps": args.grid, "seed": args.seed,
                                     "endpoint": args.endpoint,
                                     "rows": [{"lambda": r.lam, "q95_abs": r.q95_abs,
                                               "size_at_196": r.size_at_196} for r in rows]},
                                    indent=2) + "\n")
        return EXIT_OK
    lines = [f"{'lambda':>8}{'q95 |J|':>12}{'size@1.96':>12}"]
    lines += [f"{r.lam:>8.2f}{r.q95_abs:>12.3f}{r.size_at_196:>12.3f}" for r in rows]
    sys.stdout.write("\n".join(lines) + "\n")
    if not args.out:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------- vm

VM_MAX_LAGS_SHOWN = 30


def vm_report(m: int, moments: InnovationMoments) -> dict:
    """``gamma`` maps lag -> autocovariance for every lag ``0..m`` when
    ``m <= 30``; otherwise for lags ``0..30`` plus ``m-1`` and ``m``."""
    c = m ** -0.5
    lags = sorted(set(range(min(m, VM_MAX_LAGS_SHOWN) + 1)) | {m - 1, m})
    gammas = {d: gamma_d(m, d, moments.kappa1, moments.kappa2, c) for d in lags}
    v = vm(m, moments.kappa1, moments.kappa2)
    return {"m": m, "kappa1": moments.kappa1, "kappa2": moments.kappa2, "c": c, "V_m": v,
            "gamma": gammas, "Gamma_inf": long_run_variance_analytic(m, moments.kappa1, moments.kappa2, c)}


def cmd_vm(args) -> int:
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    given = [args.kappa1 is not None, args.kappa2 is not None]
    if args.sigma is not None:
        if any(given):
            raise UsageError("give either --sigma or --kappa1/--kappa2, not both")
        if not args.sigma > 0:
            raise UsageError("--sigma must be > 0")
        moments = lognormal_neg_moments(args.sigma)
    elif all(given):
        try:
            moments = InnovationMoments(args.kappa1, args.kappa2)
        except PredaccError as exc:
            raise UsageError(str(exc)) from None
    elif any(given):
        raise UsageError("--kappa1 and --kappa2 must be given together")
    else:
        moments = GAUSSIAN_MOMENTS
    rep = vm_report(args.m, moments)
    if args.json:
        sys.stdout.write(json.dumps(rep, indent=2) + "\n")
        return EXIT_OK
    v = rep["V_m"]
    lines = [f"m = {args.m}   kappa1 = {moments.kappa1:.6g}   kappa2 = {moments.kappa2:.6g}   c = {rep['c']:.6g}",
             f"V_m       = {v:.6f}"]
    prev = -1
    for d, g in rep["gamma"].items():
        if d > prev + 1:
            lines.append("...")
        lines.append(f"gamma_{d:<3} = {g:.6g}")
        prev = d
    lines.append(f"Gamma_inf = {rep['Gamma_inf']:.6g}")
    if v > 1:
        lines.append(f"note: V_m = {v:.3f} > 1, the GW test over-rejects under the unconditional null"
                     + ("; V_m > 3" if v > 3 else ""))
    elif v < 1:
        lines.append(f"note: V_m = {v:.3f} < 1, the GW test under-rejects under the unconditional null")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="predacc", description="Equal predictive accuracy tests and size studies.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON to standard output")
    common.add_argument("--out", metavar="PATH", help="write the report / CSV to PATH")

    e = sub.add_parser("evaluate", parents=[common], help="test a CSV of y, f1, f2")
    e.add_argument("file")
    e.add_argument("--tests", default="GW,DM,SUB", help="comma list of GW, DM, SUB")
    e.add_argument("--alpha", type=float, default=0.05)
    e.add_argument("--K", type=int, default=2, help="blocks for the subsample t-test")
    e.add_argument("--lags", default="textbook", help="'textbook' or an integer Newey-West lag count")
    e.set_defaults(func=cmd_evaluate)

    t1 = sub.add_parser("table1", parents=[common], help="Monte Carlo size table")
    t1.add_argument("--config", metavar="INI")
    t1.add_argument("--sigma", nargs="+", metavar="S")
    t1.add_argument("--m", type=int, nargs="+")
    t1.add_argument("--n", type=int, nargs="+")
    t1.add_argument("--reps", type=int)
    t1.add_argument("--tests")
    t1.add_argument("--alpha", type=float)
    t1.add_argument("--lags")
    t1.add_argument("--seed", type=int)
    t1.add_argument("--workers", type=int)
    t1.set_defaults(func=cmd_table1)

    t2 = sub.add_parser("table2", parents=[common], help="expanding-window limit quantiles")
    t2.add_argument("--lambda", dest="lambdas", type=float, nargs="+", required=True)
    t2.add_argument("--paths", type=int, default=10_000)
    t2.add_argument("--grid", type=int, default=20_000)
    t2.add_argument("--endpoint", choices=("left", "right"), default="right",
                    help="evaluation point of the stochastic-integral integrand")
    t2.add_argument("--seed", type=int, required=True)
    t2.add_argument("--workers", type=int, default=1)
    t2.set_defaults(func=cmd_table2)

    v = sub.add_parser("vm", parents=[common], help="closed-form V_m and autocovariances")
    v.add_argument("--m", type=int, required=True)
    v.add_argument("--sigma", type=float)
    v.add_argument("--kappa1", type=float)
    v.add_argument("--kappa2", type=float)
    v.set_defaults(func=cmd_vm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"predacc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateStatisticError as exc:
        print(f"predacc: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataError, PredaccError) as exc:
        print(f"predacc: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
