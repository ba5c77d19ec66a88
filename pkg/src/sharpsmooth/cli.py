"""Command-line interface: ``sharpsmooth <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .beta_core import beta_tail_limit, beta_values, mu
from .errors import BracketError, DomainError, NonConvergenceError
from .estimates import Equation, EquationSpec, describe_index_set, sharp_constants
from .problem import AngularSymbol, Problem, ThetaKind
from .regimes import (INTEGER_ROOT_TOL, TIE_TOL, ThresholdSolution, classify, k_star,
                      k_upper_bound_d5, solve_k_of_tau, solve_tau_star, solve_tau_upper_star)
from .specfun import QuadratureSpec
from . import verify as vf

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_k_range(text: str) -> list[int]:
    """'0..5' (inclusive), '0,2,7' or '3'."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
            if hi < lo:
                raise ValueError
            ks = list(range(lo, hi + 1))
        else:
            ks = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree range {text!r}") from None
    if not ks or min(ks) < 0:
        raise argparse.ArgumentTypeError("degrees must be nonnegative")
    return ks


def read_theta_table(path: str) -> dict[int, float]:
    """Whitespace- or comma-separated ``k value`` pairs; '#' starts a comment."""
    table: dict[int, float] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise UsageError(f"bad theta table line: {line!r}")
        table[int(parts[0])] = float(parts[1])
    if not table:
        raise UsageError("empty theta table")
    return table


def _num(x):
    """JSON-safe float: repr round-trips; non-finite values become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _threshold(sol: ThresholdSolution) -> dict:
    return {"value": _num(sol.value), "complement": _num(sol.complement), "residual": _num(sol.residual),
            "bracket": [_num(b) for b in sol.bracket], "iterations": sol.iterations}


# ---------------------------------------------------------------------------
# commands: each returns (inputs, results, rows, exit_code)
# ---------------------------------------------------------------------------

def cmd_constants(args) -> tuple[dict, dict, list[dict], int]:
    kind = ThetaKind(args.theta)
    ks = args.k
    if kind is ThetaKind.CUSTOM:
        if not args.theta_table:
            raise UsageError("--theta custom needs --theta-table FILE")
        table = read_theta_table(args.theta_table)
        missing = [k for k in ks if k not in table]
        if missing:
            raise UsageError(f"theta table has no entry for k = {missing}")
        problem = Problem(args.d, args.tau, AngularSymbol.from_table(args.d, table))
    else:
        problem = Problem.standard(args.d, args.tau, kind)
    values = beta_values(problem, np.array(ks))
    rows = [{"k": k, "mu": mu(k, args.d), "beta": _num(v)} for k, v in zip(ks, values)]
    tail = beta_tail_limit(problem)
    inputs = {"d": args.d, "tau": args.tau, "theta": kind.value, "k": ks}
    results = {"rows": rows, "tail_limit": _num(tail), "certified": kind is not ThetaKind.CUSTOM}
    return inputs, results, rows, EXIT_OK


def _report_results(report) -> dict:
    return {
        "regime_label": report.regime_label.value,
        "b": _num(report.b),
        "B": _num(report.B),
        "kmin_set": report.kmin_set.to_json(),
        "kmax_set": report.kmax_set.to_json(),
        "certified": report.certified,
        "identity": abs(report.B - report.b) <= 1e-12 * abs(report.B),
        "flags": list(report.flags),
        "thresholds": {k: _num(v) for k, v in report.thresholds.items()},
        "extremisers": {"lower": describe_index_set(report.kmin_set),
                        "upper": describe_index_set(report.kmax_set)},
    }


def cmd_classify(args):
    kind = ThetaKind(args.theta)
    if kind is ThetaKind.CUSTOM:
        raise UsageError("classification needs a parametric theta (sobolev, homogeneous, one)")
    report = classify(args.d, args.tau, kind)
    results = _report_results(report)
    row = {"d": args.d, "tau": args.tau, "theta": kind.value, **{
        k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in results.items()}}
    return {"d": args.d, "tau": args.tau, "theta": kind.value}, results, [row], EXIT_OK


def cmd_thresholds(args):
    if args.d < 5:
        raise DomainError(f"thresholds are defined for d >= 5, got d = {args.d}")
    lo, hi = solve_tau_star(args.d), solve_tau_upper_star(args.d)
    results: dict[str, Any] = {"tau_star": _threshold(lo), "tau_upper_star": _threshold(hi),
                               "ordered": lo.value <= hi.value}
    rows = [{"quantity": "tau_star", **_threshold(lo)}, {"quantity": "tau_upper_star", **_threshold(hi)}]
    if args.sweep:
        if args.sweep < 1:
            raise UsageError("--sweep needs a positive count")
        # interior points of (tau_*, d), uniform in log(d - tau)
        comps = np.geomspace(lo.complement, lo.complement * 1e-3, args.sweep + 2)[1:-1]
        sweep = []
        for comp in comps:
            tau = args.d - float(comp)
            sol = solve_k_of_tau(args.d, tau, float(comp))
            ks = k_star(args.d, tau, float(comp))
            sweep.append({"tau": _num(tau), "k_of_tau": _num(sol.value), "k_star": ks.value,
                          "integer_root": ks.integer_root, "residual": _num(sol.residual),
                          "upper_bound": _num(k_upper_bound_d5(tau)) if args.d == 5 else None})
        results["sweep"] = sweep
        rows = [{"quantity": "sweep", **s} for s in sweep]
    return {"d": args.d, "sweep": args.sweep}, results, rows, EXIT_OK


def cmd_sharp(args):
    spec = EquationSpec(Equation(args.equation), args.d, args.s)
    res = sharp_constants(spec)
    results = {
        "equation": spec.equation.value, "d": spec.d, "s": _num(spec.s), "tau": _num(spec.tau),
        "effective_s": _num(spec.effective_s), "c": _num(res.c), "C": _num(res.C),
        "multiplier": _num(res.multiplier), "identity": res.identity,
        "data_norm": [{"field": c.field, "order": _num(c.order), "coefficient": _num(c.coefficient)}
                      for c in res.data_norm.components],
        "data_norm_text": str(res.data_norm),
        "regime_label": res.regime.regime_label.value,
        "kmin_set": res.extremisers.lower.to_json(), "kmax_set": res.extremisers.upper.to_json(),
        "extremisers": {"lower": res.extremisers.lower_text, "upper": res.extremisers.upper_text},
    }
    row = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in results.items()}
    return {"equation": spec.equation.value, "d": args.d, "s": args.s}, results, [row], EXIT_OK


def _case(report: vf.VerificationReport, rel_tol: float | None) -> dict:
    tol = report.tolerance if rel_tol is None else rel_tol
    err = report.rel_error
    passed = report.reference is not None and err <= tol
    return {"name": report.name, "computed": _num(report.computed), "reference": _num(report.reference),
            "rel_error": _num(err), "tolerance": tol, "passed": bool(passed)}


def _suite_lambda(args, quad):
    return [vf.verify_lambda(d, tau, k, quad) for d, tau, k in vf.lambda_grid()]


def _suite_simulate(args, quad):
    problem = Problem.standard(args.d, args.tau, ThetaKind(args.theta))
    return [vf.simulate_norm_ratio(problem, vf.SpectralDatum(k), quad=quad) for k in args.k]


def _suite_funk_hecke(args, quad):
    rng = np.random.default_rng(args.seed)
    out = []
    for d in (3, 4):
        for k in range(5):
            for _ in range(3):
                radius, x, o = vf.random_geometry(d, rng)
                out.append(vf.funk_hecke_check(d, k, radius, x, o))
    return out


SUITES = {"lambda": _suite_lambda, "simulate": _suite_simulate, "funk-hecke": _suite_funk_hecke}


def cmd_verify(args):
    quad = QuadratureSpec.from_env()
    names = list(SUITES) if args.suite == "all" else [args.suite]
    cases = []
    for name in names:
        cases += [{"suite": name, **_case(r, args.rel_tol)} for r in SUITES[name](args, quad)]
    passed = all(c["passed"] for c in cases)
    inputs = {"suite": args.suite, "d": args.d, "tau": args.tau, "theta": args.theta, "k": args.k,
              "seed": args.seed, "rel_tol": args.rel_tol}
    results = {"passed": passed, "n_cases": len(cases), "n_failed": sum(not c["passed"] for c in cases),
               "cases": cases}
    return inputs, results, cases, EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render_json(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    columns = list(rows[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _table_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return _cell(value)


def render_table(rows: list[dict]) -> str:
    if not rows:
        return ""
    columns = list(rows[0])
    cells = [[_table_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(line.rstrip() for line in lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    parser = argparse.ArgumentParser(prog="sharpsmooth",
                                     description="Sharp constants for smoothing estimates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    thetas = [k.value for k in ThetaKind]
    p = sub.add_parser("constants", parents=[common], help="beta_k over a range of degrees")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--theta", choices=thetas, default="sobolev")
    p.add_argument("--theta-table", metavar="FILE", help="(k, theta(mu_k)) pairs for --theta custom")
    p.add_argument("--k", type=parse_k_range, default=parse_k_range("0..10"))
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("classify", parents=[common], help="optimal constants and attaining degrees")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--theta", choices=thetas, default="sobolev")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("thresholds", parents=[common], help="tau_*, tau^* and the crossing point k(tau)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sweep", type=int, default=0, metavar="N", help="add k(tau) at N points in (tau_*, d)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("sharp", parents=[common], help="constants for a concrete equation")
    p.add_argument("equation", choices=[e.value for e in Equation])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=cmd_sharp)

    p = sub.add_parser("verify", parents=[common], help="numerical verification suites")
    p.add_argument("suite", choices=[*SUITES, "all"])
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--theta", choices=[t for t in thetas if t != "custom"], default="sobolev")
    p.add_argument("--k", type=parse_k_range, default=parse_k_range("0"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rel-tol", type=float, default=None, help="override every case tolerance")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, dict, str, str | None]:
    """Execute a command; returns (exit code, record, rendered text, output path)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    inputs, results, rows, code = args.func(args)
    quad = QuadratureSpec.from_env()
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "diagnostics": {
            "quadrature": {"abs_tol": quad.abs_tol, "rel_tol": quad.rel_tol,
                           "max_subdivisions": quad.max_subdivisions},
            "tie_tolerance": TIE_TOL,
            "integer_root_tolerance": INTEGER_ROOT_TOL,
            "runtime_s": time.perf_counter() - start,
        },
    }
    if args.format == "json":
        text = render_json(record)
    elif args.format == "csv":
        text = render_csv(rows)
    else:
        text = render_table(rows)
    return code, record, text, args.out


def main(argv: Sequence[str] | None = None) -> int:
    try:
        code, _, text, out = run(argv)
    except SystemExit as exc:  # argparse: usage errors already reported
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (DomainError, UsageError, OSError) as exc:
        print(f"sharpsmooth: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergenceError, BracketError) as exc:
        print(f"sharpsmooth: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
