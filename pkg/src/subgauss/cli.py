"""Command-line interface: ``subgauss analyze | curve | catalog | verify``.

Exit codes: 0 success, 1 inequality check failed (``verify``), 2 invalid
input, 3 solver failure, 4 unwritable output, 5 catalog mismatch.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import dataclasses
import json
import math
import operator
import os
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from . import __version__
from .cgf import cgf_centered
from .closed_forms import counterexample_catalog
from .distributions import fingerprint, from_spec, moment_table, to_spec
from .errors import (ConvergenceError, DegenerateDistributionError, EvaluationError,
                     ParameterError, SubGaussError)
from .hfunc import h_curve
from .oracle import mc_mgf, verify_inequality
from .solver import SolverOptions, bracket_bound, solve_delta, solve_hmax
from .strictness import classify

SCHEMA_VERSION = 1
CONFIG_ENV = "SUBGAUSS_CONFIG"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_SOLVER, EXIT_OUTPUT, EXIT_MISMATCH = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# options and inputs

def load_config(path: Optional[str]) -> Dict[str, Any]:
    """Read the ``[solver]`` section of an INI file into SolverOptions fields."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise CliError(f"cannot read config {path!r}: {exc}", EXIT_INPUT)
    if not parser.has_section("solver"):
        return {}
    types = {f.name: f.type for f in dataclasses.fields(SolverOptions)}
    out = {}
    for key, raw in parser.items("solver"):
        if key not in types:
            raise CliError(f"config {path!r}: unknown solver option {key!r}", EXIT_INPUT)
        try:
            out[key] = int(raw) if types[key] in (int, "int") else float(raw)
        except ValueError:
            raise CliError(f"config {path!r}: bad value for {key}: {raw!r}", EXIT_INPUT)
    return out


def build_options(args) -> SolverOptions:
    """Defaults, then config file, then command-line flags."""
    fields = load_config(getattr(args, "config", None))
    if getattr(args, "grid", None) is not None:
        fields["grid_points"] = args.grid
        fields.setdefault("delta_grid_points", 2 * args.grid - 1)
    if getattr(args, "tol", None) is not None:
        fields["sigma_rel_tol"] = args.tol
    if getattr(args, "seed", None) is not None:
        fields["seed"] = args.seed
    try:
        return SolverOptions(**fields)
    except ParameterError as exc:
        raise CliError(f"invalid solver options: {exc}", EXIT_INPUT)


def read_spec_source(source: str) -> Any:
    """Inline JSON, or ``@path`` to a JSON file."""
    if source.startswith("@"):
        try:
            text = Path(source[1:]).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {source[1:]!r}: {exc.strerror}", EXIT_INPUT)
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in --dist: {exc.msg} at line {exc.lineno} column {exc.colno}",
                       EXIT_INPUT)


def parse_dist(obj: Any):
    try:
        return from_spec(obj)
    except ParameterError as exc:
        raise CliError(f"invalid distribution spec: {exc}", EXIT_INPUT)


def parse_range(text: str, what: str):
    """``start:stop:count`` to ``(float, float, int)``."""
    parts = text.split(":")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) != 3:
            raise ValueError
    except (ValueError, IndexError):
        raise CliError(f"{what} must look like start:stop:count, got {text!r}", EXIT_INPUT)
    if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1 or (n > 1 and not lo < hi):
        raise CliError(f"{what} needs finite start < stop and count >= 1, got {text!r}", EXIT_INPUT)
    return lo, hi, n


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval_expr(text: str, env: Dict[str, float]) -> float:
    """Evaluate arithmetic like ``2-$a`` with ``$name`` bound from ``env``."""
    src = text
    for name in sorted(env, key=len, reverse=True):
        src = src.replace(f"${name}", f"({env[name]!r})")
    if "$" in src:
        raise CliError(f"unbound placeholder in {text!r}", EXIT_INPUT)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise CliError(f"unsupported expression {text!r}", EXIT_INPUT)

    try:
        return ev(ast.parse(src, mode="eval"))
    except SyntaxError:
        raise CliError(f"cannot parse expression {text!r}", EXIT_INPUT)


def substitute(template: Any, env: Dict[str, float]) -> Any:
    """Replace every string containing ``$name`` by its numeric value."""
    if isinstance(template, dict):
        return {k: substitute(v, env) for k, v in template.items()}
    if isinstance(template, list):
        return [substitute(v, env) for v in template]
    if isinstance(template, str) and "$" in template:
        return _eval_expr(template, env)
    return template


def _contains_placeholder(obj: Any) -> bool:
    if isinstance(obj, dict):
        return any(_contains_placeholder(v) for v in obj.values())
    if isinstance(obj, list):
        return any(_contains_placeholder(v) for v in obj)
    return isinstance(obj, str) and "$" in obj


def parse_sweep(text: str):
    """``name=start:stop:count`` to ``(name, values)``; values rounded to 12 decimals."""
    if "=" not in text:
        raise CliError(f"--family-sweep must look like name=start:stop:count, got {text!r}",
                       EXIT_INPUT)
    name, rng = text.split("=", 1)
    name = name.strip()
    if not name.isidentifier():
        raise CliError(f"bad sweep parameter name {name!r}", EXIT_INPUT)
    lo, hi, n = parse_range(rng, "--family-sweep")
    values = [round(float(v), 12) + 0.0 for v in np.linspace(lo, hi, n)]
    return name, values


# ---------------------------------------------------------------------------
# output helpers

def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def write_text(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out!r}: {exc.strerror}", EXIT_OUTPUT)


def _solver_guard(fn, *args):
    try:
        return fn(*args)
    except (ConvergenceError, EvaluationError, DegenerateDistributionError) as exc:
        raise CliError(f"solver failure: {exc}", EXIT_SOLVER)


# ---------------------------------------------------------------------------
# subcommands

def analysis_report(dist, opts: SolverOptions, cross_check: bool, timing: bool = True) -> Dict[str, Any]:
    t0 = time.perf_counter()
    table = moment_table(dist, 4)
    verdict = _solver_guard(classify, dist, opts)
    hmax = verdict.solve
    methods = {"HMAX": hmax.to_dict()}
    if cross_check:
        methods["DELTA"] = _solver_guard(solve_delta, dist, opts).to_dict()
    elapsed = int(round((time.perf_counter() - t0) * 1000)) if timing else 0
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "distribution": to_spec(dist),
        "fingerprint": fingerprint(dist),
        "mean": table.mean,
        "variance": table.variance,
        "kappa3": table.kappa3,
        "kappa4": table.kappa4,
        "kurtosis": table.kurtosis,
        "sigma_opt_sq": hmax.sigma_opt_sq,
        "lambda_star": hmax.lambda_star,
        "verdict": verdict.to_dict(),
        "methods": methods,
        "timing_ms": elapsed,
    }


def cmd_analyze(args) -> int:
    opts = build_options(args)
    dist = parse_dist(read_spec_source(args.dist))
    report = analysis_report(dist, opts, args.cross_check, timing=not args.no_timing)
    write_text(_dump_json(report), args.out)
    return EXIT_OK


def _curve_for(dist, lam_range, opts):
    if lam_range is None:
        lo, hi = _solver_guard(bracket_bound, dist, opts)
        return _solver_guard(h_curve, dist, lo, hi, 1001)
    lo, hi, n = lam_range
    if n < 2:
        raise CliError("--lambda-range needs at least 2 points", EXIT_INPUT)
    return _solver_guard(h_curve, dist, lo, hi, n)


def _write_curve(curve, path: Path) -> None:
    try:
        curve.to_csv(path)
    except OSError as exc:
        raise CliError(f"cannot write {str(path)!r}: {exc.strerror}", EXIT_OUTPUT)


def cmd_curve(args) -> int:
    opts = build_options(args)
    template = read_spec_source(args.dist)
    lam_range = parse_range(args.lambda_range, "--lambda-range") if args.lambda_range else None

    if not args.family_sweep:
        curve = _curve_for(parse_dist(template), lam_range, opts)
        if args.out is None or args.out == "-":
            curve.to_csv(sys.stdout)
        else:
            _write_curve(curve, Path(args.out))
        return EXIT_OK

    name, values = parse_sweep(args.family_sweep)
    if not _contains_placeholder(template):
        if not isinstance(template, dict):
            raise CliError("--dist must be a JSON object", EXIT_INPUT)
        template = dict(template, **{name: f"${name}"})
    if args.out is None:
        raise CliError("--family-sweep needs --out DIRECTORY", EXIT_INPUT)
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {args.out!r}: {exc.strerror}", EXIT_OUTPUT)

    rows = ["param,lambda_star,sigma_opt_sq"]
    for v in sorted(values):
        dist = parse_dist(substitute(template, {name: v}))
        curve = _curve_for(dist, lam_range, opts)
        _write_curve(curve, outdir / f"h_{name}={v!r}.csv")
        res = _solver_guard(solve_hmax, dist, opts)
        rows.append(f"{v!r},{res.lambda_star!r},{res.sigma_opt_sq!r}")
    try:
        (outdir / "maxima.csv").write_text("\n".join(rows) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write maxima.csv: {exc.strerror}", EXIT_OUTPUT)
    return EXIT_OK


def catalog_report(opts: SolverOptions, only: Optional[str] = None) -> Dict[str, Any]:
    cases = counterexample_catalog()
    if only is not None:
        cases = [c for c in cases if c.name == only]
        if not cases:
            names = ", ".join(c.name for c in counterexample_catalog())
            raise CliError(f"unknown case {only!r}; known cases: {names}", EXIT_INPUT)
    rows = []
    for case in cases:
        v = _solver_guard(classify, case.dist, opts)
        sigma = v.solve.sigma_opt_sq
        ok = v.verdict == case.expected_verdict
        if case.expected_sigma is not None:
            ok = ok and abs(sigma - case.expected_sigma) <= 1e-8 * case.expected_sigma
        rows.append({
            "name": case.name,
            "distribution": to_spec(case.dist),
            "expected_verdict": case.expected_verdict.value,
            "verdict": v.verdict.value,
            "expected_sigma": case.expected_sigma,
            "sigma_opt_sq": sigma,
            "lambda_star": v.lambda_star,
            "kappa3": v.kappa3,
            "kappa4": v.kappa4,
            "reasons": list(v.reasons),
            "pass": ok,
        })
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
            "all_pass": all(r["pass"] for r in rows), "cases": rows}


def cmd_catalog(args) -> int:
    opts = build_options(args)
    report = catalog_report(opts, args.only)
    for r in report["cases"]:
        mark = "PASS" if r["pass"] else "FAIL"
        print(f"{mark}  {r['name']:<18} expected {r['expected_verdict']:<9} got {r['verdict']}",
              file=sys.stderr)
    write_text(_dump_json(report), args.out)
    if not report["all_pass"]:
        failed = ", ".join(r["name"] for r in report["cases"] if not r["pass"])
        print(f"catalog mismatch: {failed}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_verify(args) -> int:
    opts = build_options(args)
    dist = parse_dist(read_spec_source(args.dist))
    if args.sigma is None:
        sigma = _solver_guard(solve_hmax, dist, opts).sigma_opt_sq
    else:
        sigma = args.sigma
    if args.lambda_range:
        lo, hi, n = parse_range(args.lambda_range, "--lambda-range")
    else:
        lo, hi = _solver_guard(bracket_bound, dist, opts)
        n = 2001
    grid = np.linspace(lo, hi, n)
    try:
        ok, worst_lam, worst_delta = verify_inequality(dist, sigma, grid)
    except ParameterError as exc:
        raise CliError(str(exc), EXIT_INPUT)
    mc = []
    for lam in args.mc_lambda:
        try:
            est = mc_mgf(dist, lam, args.samples, opts.seed)
        except ParameterError as exc:
            raise CliError(str(exc), EXIT_INPUT)
        exact = math.exp(cgf_centered(dist, lam))
        z = 0.0 if est.std_error == 0 else (est.value - exact) / est.std_error
        mc.append({"lambda": lam, "value": est.value, "std_error": est.std_error,
                   "analytic": exact, "z": z, "n_samples": est.n_samples, "seed": est.seed})
    report = {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
              "distribution": to_spec(dist), "sigma_sq": sigma,
              "inequality": {"ok": ok, "worst_lambda": worst_lam, "worst_delta": worst_delta,
                             "grid": [lo, hi, n]},
              "monte_carlo": mc}
    write_text(_dump_json(report), args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------

def _add_solver_flags(p):
    p.add_argument("--grid", type=int, help="grid points for the h scan (default 4097)")
    p.add_argument("--tol", type=float, help="relative tolerance on sigma^2 for the Delta bisection")
    p.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
    p.add_argument("--config", help=f"INI file with a [solver] section (default: ${CONFIG_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgauss",
        description="Optimal sub-Gaussian proxy variance of bounded distributions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="moments, proxy variance and strictness verdict as JSON")
    p.add_argument("--dist", required=True, help="distribution JSON, or @file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--cross-check", action="store_true", help="also run the Delta bisection")
    p.add_argument("--no-timing", action="store_true", help="report timing_ms as 0")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("curve", help="write h on a grid as CSV (lambda,h)")
    p.add_argument("--dist", required=True,
                   help="distribution JSON or @file; with a sweep, strings like \"$a\" or "
                        "\"2-$a\" are replaced by the swept value")
    p.add_argument("--lambda-range", help="min:max:n (default: solver bracket, 1001 points)")
    p.add_argument("--family-sweep", help="name=start:stop:count; writes one CSV per value "
                                          "and maxima.csv into --out")
    p.add_argument("--out", help="CSV path, or directory with --family-sweep")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("catalog", help="classify the named reference cases")
    p.add_argument("--only", help="run a single case by name")
    p.add_argument("--out", help="output path (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", help="check the sub-Gaussian inequality and Monte-Carlo MGFs")
    p.add_argument("--dist", required=True, help="distribution JSON, or @file")
    p.add_argument("--sigma", type=float, help="proxy variance to test (default: the optimum)")
    p.add_argument("--lambda-range", help="min:max:n (default: solver bracket, 2001 points)")
    p.add_argument("--mc-lambda", type=float, nargs="*", default=[-2.0, -0.5, 0.5, 2.0],
                   help="lambdas for the Monte-Carlo MGF check")
    p.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo sample size")
    p.add_argument("--out", help="output path (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


_RANGE_FLAGS = ("--lambda-range", "--family-sweep")


def _join_range_values(argv: Sequence[str]) -> list:
    """Attach range values to their flag so ``--lambda-range -10:10:101`` parses."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_range_values(sys.argv[1:] if argv is None else argv))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SubGaussError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
