"""The effective eigenvalue e(b) = inf_m lambda_m(b) and what is done with it.

Sweeps over (b, m), the lambda_0 / lambda_1 crossing, the b-derivative of
lambda_m from the ground state, a non-monotonicity report, Rayleigh quotients
of user trial functions, and the large-Robin-parameter composition
-gamma^2 + 2 gamma + e(b).
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .eigensolver import (
    ConvergenceError,
    EigenPair,
    ModeProblem,
    SolverConfig,
    assemble_matrix,
    coupling_matrix,
    solve_mode,
)
from .quadrature import gauss_legendre

logger = logging.getLogger(__name__)

__all__ = [
    "TRIAL_THRESHOLD",
    "BracketError",
    "EffectiveEigenvalue",
    "SweepRow",
    "SweepTable",
    "CrossingResult",
    "MonotonicityReport",
    "auto_modes",
    "effective_eigenvalue",
    "sweep",
    "find_crossing",
    "hf_derivative",
    "monotonicity_report",
    "rayleigh_quotient",
    "sin_trial_quotient",
    "robin_asymptotic",
]

# b above which the trial function sin(theta) beats lambda_0 = b^2/4
TRIAL_THRESHOLD = 16 / (3 * math.pi)


class BracketError(ValueError):
    """The crossing function does not change sign over the bracket."""


def _argmin(pairs):
    """Mode with least eigenvalue; ties go to smaller |m|, then m >= 0."""
    return min(pairs, key=lambda p: (p[1], abs(p[0]), p[0] < 0))


def auto_modes(b: float) -> list[int]:
    """Modes that can attain e(b): m = 0 .. ceil(b) + 1.

    For m > b the potential satisfies (m/sin - b/2)^2 >= (m - b/2)^2 > b^2/4,
    and negative m are above b^2/4 for b > 0.
    """
    return list(range(0, math.ceil(b) + 2))


class EffectiveEigenvalue(NamedTuple):
    e_value: float
    argmin_m: int
    per_mode: tuple


def effective_eigenvalue(b: float, config: SolverConfig | None = None) -> EffectiveEigenvalue:
    if not b >= 0:
        raise ValueError(f"b must be non-negative, got {b}")
    config = config or SolverConfig()
    pairs = tuple(solve_mode(ModeProblem(m, b), config) for m in auto_modes(b))
    bad = [p.problem for p in pairs if not p.converged]
    if bad:
        raise ConvergenceError(
            "unconverged modes: " + ", ".join(f"(m={p.m}, b={p.b})" for p in bad), bad
        )
    m, lam = _argmin((p.problem.m, p.eigenvalue) for p in pairs)
    return EffectiveEigenvalue(lam, m, pairs)


@dataclass(frozen=True)
class SweepRow:
    b: float
    m: int
    lam: float
    converged: bool
    n_used: int
    residual: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    per_b: tuple  # (b, e_value, argmin_m); e_value is nan if no row converged

    def modes(self) -> list[int]:
        return sorted({r.m for r in self.rows})

    def curve(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        rows = [r for r in self.rows if r.m == m]
        return np.array([r.b for r in rows]), np.array([r.lam for r in rows])

    def argmin_switches(self) -> list[tuple[float, float, int, int]]:
        """Consecutive grid points where the argmin mode changes."""
        out = []
        for (b0, _, m0), (b1, _, m1) in zip(self.per_b, self.per_b[1:]):
            if m0 != m1:
                out.append((b0, b1, m0, m1))
        return out


def sweep(
    b_grid: Sequence[float],
    m_set: Sequence[int] | None = None,
    config: SolverConfig | None = None,
    *,
    workers: int = 1,
) -> SweepTable:
    """Solve every (b, m) pair; ``m_set=None`` scans :func:`auto_modes` per b."""
    b_grid = [float(b) for b in b_grid]
    if not b_grid:
        raise ValueError("empty b grid")
    if not all(math.isfinite(b) for b in b_grid):
        raise ValueError("b grid must be finite")
    config = config or SolverConfig()
    jobs = [
        ModeProblem(m, b)
        for b in b_grid
        for m in (auto_modes(b) if m_set is None else m_set)
    ]

    def run(problem):
        return solve_mode(problem, config)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(p) for p in jobs]

    rows = tuple(
        SweepRow(r.problem.b, r.problem.m, r.eigenvalue, r.converged, r.n_used, r.residual)
        for r in results
    )
    flagged = [(r.b, r.m) for r in rows if not r.converged]
    if flagged:
        warnings.warn(f"{len(flagged)} unconverged rows: {flagged}", RuntimeWarning, stacklevel=2)

    per_b = []
    for b in dict.fromkeys(b_grid):
        ok = [(r.m, r.lam) for r in rows if r.b == b and r.converged]
        if ok:
            m, lam = _argmin(ok)
            per_b.append((b, lam, m))
        else:
            per_b.append((b, math.nan, None))
    return SweepTable(rows, tuple(per_b))


@dataclass(frozen=True)
class CrossingResult:
    m_a: int
    m_b: int
    b0: float
    bracket_used: tuple
    iterations: int
    lambda_at_b0: float
    lambda_a: float
    lambda_b: float


def _converged_value(problem: ModeProblem, config: SolverConfig) -> float:
    pair = solve_mode(problem, config)
    if not pair.converged:
        raise ConvergenceError(f"solver did not converge for {problem}", [problem])
    return pair.eigenvalue


def find_crossing(
    m_a: int,
    m_b: int,
    bracket: tuple[float, float],
    config: SolverConfig | None = None,
    *,
    xtol: float = 1e-8,
) -> CrossingResult:
    """Bisect g(b) = lambda_{m_a}(b) - lambda_{m_b}(b) down to ``xtol``."""
    if m_a == m_b:
        raise ValueError("a mode cannot cross itself")
    config = config or SolverConfig()
    lo, hi = sorted(map(float, bracket))

    def g(b):
        return _converged_value(ModeProblem(m_a, b), config) - _converged_value(
            ModeProblem(m_b, b), config
        )

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        hi = lo
    elif g_hi == 0.0:
        lo = hi
    elif (g_lo > 0) == (g_hi > 0):
        raise BracketError(
            f"lambda_{m_a} - lambda_{m_b} has the same sign at b={lo} ({g_lo:.3g}) "
            f"and b={hi} ({g_hi:.3g})"
        )
    iterations = 0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        iterations += 1
        if g_mid == 0.0:
            lo = hi = mid
        elif (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    b0 = 0.5 * (lo + hi)
    lam_a = _converged_value(ModeProblem(m_a, b0), config)
    lam_b = _converged_value(ModeProblem(m_b, b0), config)
    return CrossingResult(
        m_a, m_b, b0, tuple(sorted(map(float, bracket))), iterations, lam_a, lam_a, lam_b
    )


def hf_derivative(problem: ModeProblem, config: SolverConfig | None = None) -> float:
    """d lambda_m / d b from the normalized ground state.

    Equals -int (m / sin - b / 2) |f|^2 sin dtheta, i.e. ``b/2 - m c^T G c``
    in coefficients.  At m = 1 past the crossing this is -C_{b0} < 0.
    """
    pair = solve_mode(problem, config)
    if not pair.converged:
        raise ConvergenceError(f"solver did not converge for {problem}", [problem])
    value = problem.b / 2
    if problem.m != 0:
        c = pair.coeffs
        value -= problem.m * float(c @ coupling_matrix(problem.m_abs, c.size) @ c)
    return value


@dataclass(frozen=True)
class MonotonicityReport:
    grid: tuple
    e_values: tuple
    argmin_m: tuple
    increasing_intervals: tuple
    decreasing_intervals: tuple
    non_monotonic: bool
    witness: tuple | None  # (b, delta, e(b), e(b + delta))


def _runs(grid, mask):
    """Merge consecutive flagged grid steps into (b_lo, b_hi) intervals."""
    out = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            out.append((grid[start], grid[i]))
            start = None
    if start is not None:
        out.append((grid[start], grid[len(mask)]))
    return tuple(out)


def monotonicity_report(
    b_grid: Sequence[float],
    config: SolverConfig | None = None,
    *,
    noise_tol: float = 1e-9,
) -> MonotonicityReport:
    """Sample e(b) on a sorted grid and look for both rises and falls."""
    grid = [float(b) for b in b_grid]
    if len(grid) < 3:
        raise ValueError("need at least three grid points")
    if any(b1 <= b0 for b0, b1 in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    effs = [effective_eigenvalue(b, config) for b in grid]
    e = [x.e_value for x in effs]
    diffs = np.diff(e)
    up = diffs > noise_tol
    down = diffs < -noise_tol
    witness = None
    if down.any():
        i = int(np.flatnonzero(down)[0])
        witness = (grid[i], grid[i + 1] - grid[i], e[i], e[i + 1])
    return MonotonicityReport(
        grid=tuple(grid),
        e_values=tuple(e),
        argmin_m=tuple(x.argmin_m for x in effs),
        increasing_intervals=_runs(grid, up),
        decreasing_intervals=_runs(grid, down),
        non_monotonic=bool(up.any() and down.any()),
        witness=witness,
    )


def _theta_rule(n: int):
    rule = gauss_legendre(n)
    half = math.pi / 2
    return half * (rule.nodes + 1.0), half * rule.weights


def rayleigh_quotient(
    problem: ModeProblem,
    trial: np.ndarray | Callable,
    *,
    derivative: Callable | None = None,
    n_quad: int = 256,
    interp_degree: int = 96,
) -> float:
    """q_{m,b}(f) / ||f||^2 for a trial function f.

    ``trial`` is either a coefficient vector in the ``P~_l^{|m|}`` basis or a
    callable of theta.  For callables the derivative is taken from a
    Chebyshev interpolant on [0, pi] unless ``derivative`` is given, and the
    integrals are done by Gauss-Legendre in theta.
    """
    if not callable(trial):
        c = np.asarray(trial, dtype=float)
        norm2 = float(c @ c)
        if norm2 == 0.0:
            raise ValueError("trial function is identically zero")
        return float(c @ assemble_matrix(problem, c.size) @ c) / norm2

    if derivative is None:
        cheb = np.polynomial.Chebyshev.interpolate(trial, interp_degree, domain=[0, math.pi])
        derivative = cheb.deriv()
    if problem.m != 0:
        ends = np.abs(np.asarray(trial(np.array([0.0, math.pi])), dtype=float))
        if np.any(ends > 1e-10):
            raise ValueError("trial function must vanish at both poles when m != 0")
    theta, w = _theta_rule(n_quad)
    s = np.sin(theta)
    f = np.asarray(trial(theta), dtype=float) * np.ones_like(theta)
    df = np.asarray(derivative(theta), dtype=float) * np.ones_like(theta)
    norm2 = float(np.dot(w, f**2 * s))
    if norm2 == 0.0:
        raise ValueError("trial function is identically zero")
    # V f^2 sin = (m - (b/2) sin)^2 f^2 / sin, no cancellation near the poles
    form = np.dot(w, df**2 * s + (problem.m - 0.5 * problem.b * s) ** 2 * f**2 / s)
    return float(form) / norm2


def sin_trial_quotient(b: float) -> float:
    """Closed-form q_{1,b}(sin) / ||sin||^2 = b^2/4 - (3/8) pi b + 2."""
    return b * b / 4 - 3 * math.pi * b / 8 + 2


def robin_asymptotic(gamma: float, b: float, config: SolverConfig | None = None) -> float:
    """Leading terms -gamma^2 + 2 gamma + e(b) of the ball's lowest eigenvalue.

    The o(1) remainder as gamma -> infinity is not modeled.
    """
    return -gamma * gamma + 2 * gamma + effective_eigenvalue(b, config).e_value
