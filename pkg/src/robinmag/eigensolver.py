"""Lowest eigenvalue of the fiber operator L_{m,b} by Rayleigh-Ritz.

With ``x = cos(theta)`` the weighted space L^2((0, pi); sin(theta) dtheta)
becomes L^2(-1, 1) and the quadratic form

    q_{m,b}(f) = int (|f'|^2 + (m / sin(theta) - b / 2)^2 |f|^2) sin(theta) dtheta

is represented in the orthonormal basis ``P~_l^{|m|}`` by

    A = diag(l (l + 1)) + (b^2 / 4) I - m b G,
    G_{ll'} = int P~_l P~_l' (1 - x^2)^(-1/2) dx.

The diagonal part is exact (Legendre's equation); ``G`` is integrated exactly
by Gauss-Chebyshev of the second kind when ``|m| >= 1``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .legendre import legendre_table
from .quadrature import gauss_chebyshev2, quadrature_order

__all__ = [
    "ModeProblem",
    "SolverConfig",
    "EigenPair",
    "ConvergenceError",
    "coupling_matrix",
    "assemble_matrix",
    "smallest_eigenpair",
    "solve_mode",
    "mode_spectrum",
]


class ConvergenceError(RuntimeError):
    """Raised when a caller needs converged eigenvalues and did not get them."""

    def __init__(self, message: str, problems=()):
        super().__init__(message)
        self.problems = tuple(problems)


@dataclass(frozen=True)
class ModeProblem:
    """Angular mode ``m`` and field strength ``b`` of one fiber operator."""

    m: int
    b: float

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m:
            raise ValueError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "b", float(self.b))
        if not math.isfinite(self.b):
            raise ValueError("b must be finite")

    @property
    def m_abs(self) -> int:
        return abs(self.m)

    def potential(self, theta):
        """V_{m,b}(theta) = (m / sin(theta) - b / 2)^2."""
        return (self.m / np.sin(theta) - self.b / 2) ** 2


@dataclass(frozen=True)
class SolverConfig:
    n_initial: int = 16
    n_max: int = 2048
    rel_tol: float = 1e-10
    residual_tol: float = 1e-8

    def __post_init__(self):
        if self.n_initial < 1 or self.n_max < 1:
            raise ValueError("basis sizes must be positive")
        if self.n_initial > self.n_max:
            raise ValueError("n_initial must not exceed n_max")
        if not (self.rel_tol > 0 and self.residual_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class EigenPair:
    """Lowest Ritz value and its unit coefficient vector.

    ``history`` holds the ``(n, eigenvalue)`` sequence of the doubling loop.
    """

    problem: ModeProblem
    eigenvalue: float
    coeffs: np.ndarray = field(repr=False)
    n_used: int
    residual: float
    converged: bool
    history: tuple = ()

    def __post_init__(self):
        self.coeffs.setflags(write=False)


@functools.lru_cache(maxsize=24)
def coupling_matrix(m_abs: int, n: int) -> np.ndarray:
    """G_{ll'} for ``l, l' = m_abs .. m_abs + n - 1`` (read-only, cached)."""
    if m_abs < 1:
        raise ValueError("the coupling matrix is only formed for m_abs >= 1")
    rule = gauss_chebyshev2(quadrature_order(m_abs + n - 1))
    x = rule.nodes
    table = legendre_table(m_abs, n, x)
    scaled = table * (rule.weights / ((1.0 - x) * (1.0 + x)))
    g = scaled @ table.T
    g = 0.5 * (g + g.T)
    g.setflags(write=False)
    return g


def assemble_matrix(problem: ModeProblem, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    ell = np.arange(problem.m_abs, problem.m_abs + n, dtype=float)
    a = np.diag(ell * (ell + 1.0) + problem.b**2 / 4)
    mb = problem.m * problem.b
    if mb != 0.0:
        a -= mb * coupling_matrix(problem.m_abs, n)
    return a


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def smallest_eigenpair(a) -> tuple[float, np.ndarray]:
    """Minimal eigenvalue of a symmetric matrix and a unit eigenvector.

    The eigenvalue is returned as the Rayleigh quotient of the computed
    vector.  LAPACK's eigenvalue is only accurate to about ``eps * ||A||``,
    and ``||A||`` grows like ``n**2`` here, while the quotient keeps the error
    relative to the eigenvalue itself.  The eigenvector's first
    non-negligible component is made positive; if the minimum is degenerate
    the vector is the normalized projection of the first standard basis
    vector with a nonzero component in the eigenspace.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    w, v = scipy.linalg.eigh(a, subset_by_index=[0, min(n, 2) - 1])
    tol = 1e-12 * max(1.0, float(np.abs(w).max()))
    if n > 1 and w[1] - w[0] <= tol:
        # degenerate minimum: project the first usable unit vector e_j
        w, v = scipy.linalg.eigh(a)
        q = v[:, w - w[0] <= tol]
        proj = q @ q.T
        j = int(np.flatnonzero(np.linalg.norm(proj, axis=0) > 1e-8)[0])
        vec = proj[:, j]
    else:
        vec = v[:, 0]
    vec = _fix_sign(vec / np.linalg.norm(vec))
    return float(vec @ a @ vec), vec


def _ritz(problem: ModeProblem, n: int):
    # P~_l^{|m|} has parity (-1)^(l - |m|), so G only couples degrees of equal
    # parity and A splits into two independent blocks.
    a = assemble_matrix(problem, n)
    best = None
    for start in (0, 1):
        idx = np.arange(start, n, 2)
        if idx.size == 0:
            continue
        lam, v = smallest_eigenpair(a[np.ix_(idx, idx)])
        if best is None or lam < best[0]:
            best = (lam, idx, v)
    lam, idx, v = best
    c = np.zeros(n)
    c[idx] = v
    residual = float(np.linalg.norm(a @ c - lam * c))
    return lam, c, residual


def solve_mode(problem: ModeProblem, config: SolverConfig | None = None) -> EigenPair:
    """Lowest eigenvalue lambda_m(b) from nested Ritz subspaces.

    The basis size doubles from ``n_initial`` until two consecutive Ritz
    values agree to ``rel_tol * max(1, |lambda|)``; the finer one is kept.
    Every Ritz value is an upper bound for the true eigenvalue.  Hitting
    ``n_max`` first yields ``converged=False`` rather than an exception.
    """
    config = config or SolverConfig()
    n = config.n_initial
    lam, c, res = _ritz(problem, n)
    history = [(n, lam)]
    converged = False
    while n < config.n_max:
        n_next = min(2 * n, config.n_max)
        lam_next, c, res = _ritz(problem, n_next)
        history.append((n_next, lam_next))
        done = abs(lam_next - lam) <= config.rel_tol * max(1.0, abs(lam))
        n, lam = n_next, lam_next
        if done:
            converged = True
            break
    converged = converged and res <= config.residual_tol
    return EigenPair(problem, lam, c, n, res, converged, tuple(history))


def mode_spectrum(problem: ModeProblem, n: int) -> np.ndarray:
    """All Ritz values of the n-dimensional Galerkin matrix (debug aid)."""
    return scipy.linalg.eigvalsh(assemble_matrix(problem, n))
