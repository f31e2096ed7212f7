"""Batch checks behind the ``certify`` and ``validate`` commands.

Each check yields a :class:`CheckResult`; a check whose computation fails
is reported with ``error`` set instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .eigensolver import ModeProblem, SolverConfig, solve_mode
from .legendre import legendre_table
from .quadrature import gauss_chebyshev2, gauss_legendre, log_two_integral
from .spectrum import (
    TRIAL_THRESHOLD,
    find_crossing,
    hf_derivative,
    monotonicity_report,
    sin_trial_quotient,
)

__all__ = ["CheckResult", "grid", "run_certification", "run_self_tests"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)
    error: str | None = None


def grid(lo: float, hi: float, step: float) -> list[float]:
    """``lo, lo + step, ...`` up to ``hi`` inclusive within half a step."""
    if not step > 0:
        raise ValueError("step must be positive")
    if hi < lo:
        raise ValueError("range upper end is below its lower end")
    count = math.floor((hi - lo) / step + 0.5)
    return [round(lo + k * step, 12) for k in range(count + 1)]


def _run(name: str, fn: Callable[[], CheckResult]) -> CheckResult:
    try:
        return fn()
    except Exception as exc:  # reported, not raised
        return CheckResult(name, False, error=f"{type(exc).__name__}: {exc}")


def _lam(m, b, config):
    pair = solve_mode(ModeProblem(m, b), config)
    if not pair.converged:
        raise RuntimeError(f"solver did not converge at m={m}, b={b}")
    return pair.eigenvalue


def _log_two() -> CheckResult:
    value = log_two_integral(64)
    err = abs(value - math.log(2))
    return CheckResult("ln2-integral", err <= 1e-10, f"|I - ln 2| = {err:.2e}", {"value": value})


def _margin_check(name, cases, bound, config, strict_label):
    worst = math.inf
    worst_at = None
    for m, b in cases:
        margin = _lam(m, b, config) - bound(b)
        if margin < worst:
            worst, worst_at = margin, (m, b)
    return CheckResult(
        name,
        worst > 0,
        f"min(lambda - {strict_label}) = {worst:.3e} at m={worst_at[0]}, b={worst_at[1]}",
        {"min_margin": worst, "at": list(worst_at)},
    )


def run_certification(
    b_max: float = 2.0, grid_step: float = 0.02, config: SolverConfig | None = None
) -> list[CheckResult]:
    config = config or SolverConfig()
    b_grid = grid(0.0, b_max, grid_step)
    if len(b_grid) < 3:
        raise ValueError("monotonicity grid needs at least three points")
    results = [_run("ln2-integral", _log_two)]

    results.append(_run("case-i: lambda_m > b^2/4 (m=1..3, 0<=b<1)", lambda: _margin_check(
        "case-i: lambda_m > b^2/4 (m=1..3, 0<=b<1)",
        [(m, b) for m in (1, 2, 3) for b in grid(0.0, 0.9, 0.1)],
        lambda b: b * b / 4, config, "b^2/4")))
    results.append(_run("case-ii: lambda_m > 1 (m=2..4, 1<=b<2)", lambda: _margin_check(
        "case-ii: lambda_m > 1 (m=2..4, 1<=b<2)",
        [(m, b) for m in (2, 3, 4) for b in grid(1.0, 1.9, 0.1)],
        lambda b: 1.0, config, "1")))
    results.append(_run("negative modes: lambda_m > b^2/4 (m=-1,-2)", lambda: _margin_check(
        "negative modes: lambda_m > b^2/4 (m=-1,-2)",
        [(m, b) for m in (-1, -2) for b in grid(0.25, 2.5, 0.25)],
        lambda b: b * b / 4, config, "b^2/4")))
    results.append(_run("trial bound: lambda_1 <= b^2/4 - 3 pi b/8 + 2", lambda: _trial_bound(config)))

    crossing_holder = {}

    def crossing():
        res = find_crossing(0, 1, (1.0, TRIAL_THRESHOLD), config)
        crossing_holder["b0"] = res.b0
        gap = abs(res.lambda_a - res.lambda_b)
        ok = gap <= 1e-7 and 1.0 < res.b0 < TRIAL_THRESHOLD
        return CheckResult(
            "crossing lambda_0 = lambda_1 in (1, 16/(3 pi))",
            ok,
            f"b0 = {res.b0:.10f}, |lambda_0 - lambda_1| = {gap:.1e}",
            {"b0": res.b0, "lambda": res.lambda_at_b0, "iterations": res.iterations},
        )

    results.append(_run("crossing lambda_0 = lambda_1 in (1, 16/(3 pi))", crossing))

    def derivative():
        b0 = crossing_holder["b0"]
        d = hf_derivative(ModeProblem(1, b0), config)
        return CheckResult(
            "d lambda_1/db < 0 at b0 (C_b0 > 0)", d < 0, f"d lambda_1/db = {d:.6f}",
            {"derivative": d, "C_b0": -d},
        )

    results.append(_run("d lambda_1/db < 0 at b0 (C_b0 > 0)", derivative))

    def monotonicity():
        rep = monotonicity_report(b_grid, config)
        detail = (
            f"increasing on {list(rep.increasing_intervals)}, "
            f"decreasing on {list(rep.decreasing_intervals)}"
        )
        data = {
            "grid_step": grid_step,
            "b_max": b_max,
            "increasing_intervals": [list(i) for i in rep.increasing_intervals],
            "decreasing_intervals": [list(i) for i in rep.decreasing_intervals],
            "witness": None,
        }
        if rep.witness:
            b, delta, e0, e1 = rep.witness
            data["witness"] = {"b": b, "delta": delta, "e_b": e0, "e_b_plus_delta": e1}
            detail += f"; witness e({b + delta:g}) = {e1:.10f} < e({b:g}) = {e0:.10f}"
        return CheckResult("e(b) non-monotonic", rep.non_monotonic, detail, data)

    results.append(_run("e(b) non-monotonic", monotonicity))
    return results


def _trial_bound(config) -> CheckResult:
    worst = math.inf
    worst_b = None
    for b in grid(0.0, 2.0, 0.1):
        slack = sin_trial_quotient(b) + 1e-10 - _lam(1, b, config)
        if slack < worst:
            worst, worst_b = slack, b
    return CheckResult(
        "trial bound: lambda_1 <= b^2/4 - 3 pi b/8 + 2",
        worst >= 0,
        f"min slack = {worst:.3e} at b={worst_b}",
        {"min_slack": worst},
    )


def run_self_tests() -> list[CheckResult]:
    """Quadrature and basis checks."""
    out = [_run("ln2-integral", _log_two)]

    def gl_exactness():
        worst = 0.0
        for n in (1, 2, 5, 16, 64):
            rule = gauss_legendre(n)
            for k in range(2 * n):
                exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
                worst = max(worst, abs(rule.integrate(rule.nodes**k) - exact))
            worst = max(worst, abs(rule.weights.sum() - 2.0))
        return CheckResult("gauss-legendre exactness", worst <= 1e-13, f"max error {worst:.1e}")

    def gc2_exactness():
        worst = 0.0
        for n in (1, 2, 5, 16, 64):
            rule = gauss_chebyshev2(n)
            for k in range(0, 2 * n, 2):
                # int sqrt(1-x^2) x^k dx = pi (k-1)!! / (k+2)!!
                exact = math.pi
                for j in range(1, k, 2):
                    exact *= j
                for j in range(2, k + 3, 2):
                    exact /= j
                worst = max(worst, abs(rule.integrate(rule.nodes**k) - exact) / exact)
        return CheckResult("gauss-chebyshev2 exactness", worst <= 1e-13, f"max rel error {worst:.1e}")

    def orthonormality():
        worst = 0.0
        rule = gauss_legendre(64)
        for m_abs in range(5):
            table = legendre_table(m_abs, 21, rule.nodes)
            gram = (table * rule.weights) @ table.T
            worst = max(worst, float(np.abs(gram - np.eye(21)).max()))
        return CheckResult("legendre orthonormality", worst <= 1e-12, f"max deviation {worst:.1e}")

    for name, fn in (
        ("gauss-legendre exactness", gl_exactness),
        ("gauss-chebyshev2 exactness", gc2_exactness),
        ("legendre orthonormality", orthonormality),
    ):
        out.append(_run(name, fn))
    return out
