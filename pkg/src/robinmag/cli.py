"""Command-line interface.

Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure (an
unconverged solve or a failed certification item).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time
from pathlib import Path

from . import output
from .certify import grid, run_certification, run_self_tests
from .eigensolver import ConvergenceError, ModeProblem, SolverConfig, solve_mode
from .endpoint import Endpoint, classify_endpoint, frobenius_expansion, indicial_exponents
from .spectrum import (
    BracketError,
    TRIAL_THRESHOLD,
    effective_eigenvalue,
    find_crossing,
    hf_derivative,
    sweep,
)

SOLVER_KEYS = ("n_initial", "n_max", "rel_tol", "residual_tol")
CONFIG_KEYS = SOLVER_KEYS + ("out", "formats", "workers")
VALUE_OPTIONS = {"--m", "--b", "--bracket", "--exponent", "--lambda", "--ma", "--mb"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Let ``--m -2:4`` through argparse by rewriting it as ``--m=-2:4``."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv) and re.match(r"^-[\d.]", argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def parse_range(text: str) -> list[float]:
    """``lo:hi:step`` (inclusive) or a single number."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected lo:hi:step") from None
    if not all(math.isfinite(x) for x in nums):
        raise UsageError(f"range {text!r} must be finite")
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"bad range {text!r}; expected lo:hi:step")
    lo, hi, step = nums
    if step <= 0:
        raise UsageError("range step must be positive")
    if hi < lo:
        raise UsageError(f"range {text!r} is reversed")
    return grid(lo, hi, step)


def parse_modes(text: str) -> list[int]:
    """``lo:hi`` (inclusive), ``a,b,c`` or a single integer."""
    try:
        if ":" in text:
            lo, hi = (int(p) for p in text.split(":"))
            if hi < lo:
                raise UsageError(f"mode range {text!r} is reversed")
            return list(range(lo, hi + 1))
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"bad mode list {text!r}") from None


def _float_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"bad bracket {text!r}; expected lo:hi") from None
    return lo, hi


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a flat JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve(args) -> dict:
    """Merge defaults < config file < command-line flags."""
    settings = {"out": "out", "formats": ["csv"], "workers": 1}
    settings.update(load_config(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if isinstance(settings["formats"], str):
        settings["formats"] = settings["formats"].split(",")
    bad = set(settings["formats"]) - {"csv", "json", "svg"}
    if bad:
        raise UsageError(f"unknown formats: {', '.join(sorted(bad))}")
    solver = {k: settings[k] for k in SOLVER_KEYS if k in settings}
    try:
        settings["solver"] = SolverConfig(**solver)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad solver settings: {exc}") from None
    return settings


def _color(text: str, passed: bool) -> str:
    if os.environ.get("NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\033[{32 if passed else 31}m{text}\033[0m"


def _print_table(results) -> None:
    width = max(len(r.name) for r in results)
    for r in results:
        status = _color("PASS" if r.passed else "FAIL", r.passed)
        detail = r.error or r.detail
        print(f"{r.name:<{width}}  {status}  {detail}")


def _emit(obj) -> None:
    sys.stdout.write(output.to_json(obj))


def _pair_json(pair) -> dict:
    return {
        "m": pair.problem.m,
        "b": pair.problem.b,
        "lambda": pair.eigenvalue,
        "n_used": pair.n_used,
        "residual": pair.residual,
        "converged": pair.converged,
    }


def cmd_lambda(args, settings) -> int:
    pair = solve_mode(ModeProblem(args.m, args.b), settings["solver"])
    _emit(_pair_json(pair))
    return 0 if pair.converged else 2


def _out_dir(settings) -> Path:
    path = Path(settings["out"])
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {path}: {exc}") from None
    if not os.access(path, os.W_OK):
        raise UsageError(f"output directory {path} is not writable")
    return path


def cmd_sweep(args, settings) -> int:
    b_grid = parse_range(args.b)
    modes = None if args.auto or args.m is None else parse_modes(args.m)
    formats = set(settings["formats"]) | ({"svg"} if args.svg else set())
    out = _out_dir(settings)
    table = sweep(b_grid, modes, settings["solver"], workers=int(settings["workers"]))
    written = [output.write_text(out / "sweep.csv", output.sweep_csv(table))]
    written.append(output.write_text(out / "effective.csv", output.effective_csv(table.per_b)))
    if "svg" in formats:
        written.append(output.write_text(out / "sweep.svg", output.sweep_svg(table)))
    if "json" in formats:
        rows = [
            {"b": r.b, "m": r.m, "lambda": r.lam, "converged": r.converged,
             "n_used": r.n_used, "residual": r.residual}
            for r in table.rows
        ]
        per_b = [{"b": b, "e_value": e, "argmin_m": m} for b, e, m in table.per_b]
        written.append(output.write_text(out / "sweep.json", output.to_json({"rows": rows, "per_b": per_b})))
    for path in written:
        print(path)
    return 0 if all(r.converged for r in table.rows) else 2


def cmd_effective(args, settings) -> int:
    b_grid = parse_range(args.b)
    if any(b < 0 for b in b_grid):
        raise UsageError("b must be non-negative")
    results = []
    for b in b_grid:
        eff = effective_eigenvalue(b, settings["solver"])
        results.append({
            "b": b,
            "e_value": eff.e_value,
            "argmin_m": eff.argmin_m,
            "per_mode": {str(p.problem.m): p.eigenvalue for p in eff.per_mode},
        })
    out = _out_dir(settings)
    output.write_text(
        out / "effective.csv",
        output.effective_csv([(r["b"], r["e_value"], r["argmin_m"]) for r in results]),
    )
    _emit(results[0] if len(results) == 1 else results)
    return 0


def cmd_crossing(args, settings) -> int:
    bracket = _float_pair(args.bracket) if args.bracket else (1.0, TRIAL_THRESHOLD)
    res = find_crossing(args.ma, args.mb, bracket, settings["solver"])
    _emit({
        "m_a": res.m_a, "m_b": res.m_b, "b0": res.b0, "bracket": list(res.bracket_used),
        "iterations": res.iterations, "lambda_a": res.lambda_a, "lambda_b": res.lambda_b,
    })
    return 0


def cmd_derivative(args, settings) -> int:
    problem = ModeProblem(args.m, args.b)
    value = hf_derivative(problem, settings["solver"])
    result = {"m": args.m, "b": args.b, "derivative": value}
    if args.fd_step:
        h = args.fd_step
        hi = solve_mode(ModeProblem(args.m, args.b + h), settings["solver"]).eigenvalue
        lo = solve_mode(ModeProblem(args.m, args.b - h), settings["solver"]).eigenvalue
        result["central_difference"] = (hi - lo) / (2 * h)
    _emit(result)
    return 0


def _series_json(exp) -> dict:
    return {
        "exponent": exp.exponent,
        "coeffs": list(exp.coeffs),
        "symbolic": [str(c) for c in exp.symbolic],
        "resonance_order": exp.resonance_order,
        "log_case": exp.log_case,
    }


def cmd_classify(args, settings) -> int:
    problem = ModeProblem(args.m, args.b)
    classes = {e.value: classify_endpoint(problem, e) for e in Endpoint}
    zero = classes["zero"]
    series = []
    for s in dict.fromkeys(indicial_exponents(args.m)):
        series.append(_series_json(frobenius_expansion(problem, s, 0.0, args.order)))
    _emit({
        "m": problem.m,
        "b": problem.b,
        "exponents": list(zero.exponents),
        "verdict": {k: c.verdict.value for k, c in classes.items()},
        "log_case": zero.log_case,
        "essentially_self_adjoint": all(c.verdict.value == "LimitPoint" for c in classes.values()),
        "frobenius": series,
    })
    return 0


def cmd_series(args, settings) -> int:
    problem = ModeProblem(args.m, args.b)
    exponent = args.exponent if args.exponent is not None else indicial_exponents(args.m)[0]
    try:
        exp = frobenius_expansion(problem, exponent, args.lam, args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit({"m": problem.m, "b": problem.b, "lambda": args.lam, **_series_json(exp)})
    return 0


def cmd_certify(args, settings) -> int:
    if not args.grid_step > 0:
        raise UsageError("--grid-step must be positive")
    if not args.b_max > 0:
        raise UsageError("--b-max must be positive")
    if len(grid(0.0, args.b_max, args.grid_step)) < 3:
        raise UsageError("the monotonicity grid needs at least three points")
    out = _out_dir(settings)
    start = time.perf_counter()
    results = run_certification(args.b_max, args.grid_step, settings["solver"])
    _print_table(results)
    passed = all(r.passed for r in results)
    report = {
        "b_max": args.b_max,
        "grid_step": args.grid_step,
        "passed": passed,
        "items": [
            {"name": r.name, "passed": r.passed, "detail": r.detail, "error": r.error, "data": r.data}
            for r in results
        ],
    }
    output.write_text(out / "certify.json", output.to_json(report))
    print(f"overall: {_color('PASS' if passed else 'FAIL', passed)} "
          f"({time.perf_counter() - start:.1f} s)")
    return 0 if passed else 2


def cmd_validate(args, settings) -> int:
    results = run_self_tests()
    _print_table(results)
    return 0 if all(r.passed for r in results) else 2


def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--n-initial", dest="n_initial", type=int)
    g.add_argument("--n-max", dest="n_max", type=int)
    g.add_argument("--rel-tol", dest="rel_tol", type=float)
    g.add_argument("--residual-tol", dest="residual_tol", type=float)
    p.add_argument("--config", help="flat JSON file; flags override it")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robinmag", description="Effective eigenvalues of the magnetic Robin Laplacian on the ball")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lambda", help="lowest eigenvalue lambda_m(b)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b", type=float, required=True)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("sweep", help="lambda_m(b) over a grid, CSV/SVG output")
    p.add_argument("--b", required=True, help="lo:hi:step")
    p.add_argument("--m", help="lo:hi or a,b,c")
    p.add_argument("--auto", action="store_true", help="scan m = 0 .. ceil(b)+1 per b")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--formats", help="comma list from csv,json,svg")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("effective", help="e(b) = min over modes")
    p.add_argument("--b", required=True, help="value or lo:hi:step")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_effective)

    p = sub.add_parser("crossing", help="b where two modes cross")
    p.add_argument("--ma", type=int, default=0)
    p.add_argument("--mb", type=int, default=1)
    p.add_argument("--bracket", help="lo:hi (default 1:16/(3 pi))")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_crossing)

    p = sub.add_parser("derivative", help="d lambda_m/db from the ground state")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--fd-step", type=float, help="also report a central difference")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_derivative)

    p = sub.add_parser("classify", help="limit-point/limit-circle class of the endpoints")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--order", type=int, default=3)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("series", help="Frobenius series at theta = 0")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--exponent", type=float)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--order", type=int, default=4)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("certify", help="non-monotonicity certificate and inequality suite")
    p.add_argument("--b-max", type=float, default=2.0)
    p.add_argument("--grid-step", type=float, default=0.02)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("validate", help="quadrature and basis self-tests")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        settings = resolve(args)
        return args.func(args, settings)
    except (UsageError, BracketError) as exc:
        print(f"robinmag {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"robinmag {args.command}: solver failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"robinmag {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
