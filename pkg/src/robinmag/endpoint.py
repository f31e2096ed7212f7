"""Singular endpoints of L_{m,b}: Liouville form, Frobenius series, Weyl class.

The substitution ``u = w / sqrt(sin(theta))`` turns ``L_{m,b} u = lambda u``
into ``w'' + (lambda - qhat) w = 0`` with

    qhat = (m / sin - b / 2)^2 - cot^2 / 4 - 1 / 2
         = (m^2 - 1/4) / sin^2 - m b / sin + (b^2 - 1) / 4.

Near ``theta = 0`` the indicial equation is ``s (s - 1) = m^2 - 1/4`` with
roots ``1/2 +- |m|``.  ``qhat`` depends on theta only through ``sin``, so the
endpoint ``pi`` is the mirror image of ``0``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
import sympy as sp
from scipy.linalg import eigh_tridiagonal

from .eigensolver import ModeProblem

__all__ = [
    "Endpoint",
    "Verdict",
    "LiouvillePotential",
    "EndpointClass",
    "FrobeniusExpansion",
    "B",
    "LAM",
    "liouville_qhat",
    "indicial_exponents",
    "classify_endpoint",
    "frobenius_expansion",
    "liouville_fd_eigenvalue",
]

B, LAM = sp.symbols("b lambda", real=True)


class Endpoint(enum.Enum):
    ZERO = "zero"
    PI = "pi"


class Verdict(enum.Enum):
    LIMIT_POINT = "LimitPoint"
    LIMIT_CIRCLE = "LimitCircle"


@functools.lru_cache(maxsize=None)
def _csc_series(order: int) -> tuple[tuple, tuple]:
    """Exact Laurent coefficients of csc and csc^2 at 0.

    Returns ``(c1, c2)`` with ``c1[j]`` the coefficient of ``t^(j-1)`` in csc
    and ``c2[j]`` that of ``t^(j-2)`` in csc^2, for ``j = 0 .. order``.
    """
    c1 = [sp.Integer(0)] * (order + 1)
    c2 = [sp.Integer(0)] * (order + 1)
    for k in range(order // 2 + 1):
        bern = sp.bernoulli(2 * k)
        fact = sp.factorial(2 * k)
        two = sp.Integer(2)
        c1[2 * k] = (-1) ** (k + 1) * 2 * (two ** (2 * k - 1) - 1) * bern / fact
        c2[2 * k] = (-1) ** (k + 1) * two ** (2 * k) * bern * (2 * k - 1) / fact
    return tuple(c1), tuple(c2)


def _laurent_symbolic(m: int, order: int) -> tuple:
    """Coefficients of ``t^(j-2)``, ``j = 0 .. order + 2``, of qhat, exact in b."""
    c1, c2 = _csc_series(order + 2)
    q2 = sp.Integer(m) ** 2 - sp.Rational(1, 4)
    coeffs = []
    for j in range(order + 3):
        # csc contributes t^(j-2) through its c1[j-1] entry
        term = q2 * c2[j] - m * B * (c1[j - 1] if j >= 1 else 0)
        if j == 2:
            term += (B**2 - 1) / 4
        coeffs.append(sp.expand(term))
    return tuple(coeffs)


@dataclass(frozen=True)
class LiouvillePotential:
    """qhat for one mode, with its Laurent expansion at ``theta = 0``.

    ``laurent_coeffs[j]`` multiplies ``theta**(j - 2)``.
    """

    m: int
    b: float
    laurent_coeffs: tuple
    laurent_symbolic: tuple

    def __call__(self, theta):
        s = np.sin(theta)
        return (self.m**2 - 0.25) / s**2 - self.m * self.b / s + (self.b**2 - 1) / 4

    def from_definition(self, theta):
        """qhat assembled term by term from (m/sin - b/2)^2 - cot^2/4 - 1/2."""
        s, c = np.sin(theta), np.cos(theta)
        return (self.m / s - self.b / 2) ** 2 - 0.25 * c**2 / s**2 - 0.5

    def laurent(self, theta, order=None):
        coeffs = self.laurent_coeffs if order is None else self.laurent_coeffs[: order + 3]
        theta = np.asarray(theta, dtype=float)
        return sum(c * theta ** (j - 2) for j, c in enumerate(coeffs))


def liouville_qhat(problem: ModeProblem, order: int = 4) -> LiouvillePotential:
    if order < 0:
        raise ValueError("order must be non-negative")
    sym = _laurent_symbolic(problem.m, order)
    num = tuple(float(c.subs(B, problem.b)) for c in sym)
    return LiouvillePotential(problem.m, problem.b, num, sym)


def _indicial_exact(m: int) -> tuple:
    half = sp.Rational(1, 2)
    return half + abs(m), half - abs(m)


def indicial_exponents(m: int) -> tuple[float, float]:
    s_plus, s_minus = _indicial_exact(m)
    return float(s_plus), float(s_minus)


@dataclass(frozen=True)
class EndpointClass:
    endpoint: Endpoint
    exponents: tuple
    verdict: Verdict
    log_case: bool


def classify_endpoint(problem: ModeProblem, endpoint: Endpoint = Endpoint.ZERO) -> EndpointClass:
    """Weyl limit-point / limit-circle class at ``endpoint``.

    Solutions behave like ``theta**s`` (times ``log theta`` in the double-root
    case), and ``theta**s`` is square integrable near 0 iff ``2 s > -1``.
    The endpoint is limit circle iff both behaviors are square integrable.
    """
    endpoint = Endpoint(endpoint)
    s_plus, s_minus = _indicial_exact(problem.m)
    circle = all(2 * s > -1 for s in (s_plus, s_minus))
    return EndpointClass(
        endpoint=endpoint,
        exponents=(float(s_plus), float(s_minus)),
        verdict=Verdict.LIMIT_CIRCLE if circle else Verdict.LIMIT_POINT,
        log_case=bool(s_plus == s_minus),
    )


@dataclass(frozen=True)
class FrobeniusExpansion:
    """w = theta^s * sum_k a_k theta^k, a_0 = 1, near ``theta = 0``.

    ``symbolic`` holds the coefficients as exact expressions in ``b`` and
    ``lambda``.  ``resonance_order`` is the k at which the recurrence
    denominator vanishes; the series stops before it.
    """

    m: int
    b: float
    lam: float
    exponent: float
    coeffs: tuple
    symbolic: tuple
    resonance_order: int | None
    log_case: bool

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return sum(a * theta ** (self.exponent + k) for k, a in enumerate(self.coeffs))

    def derivative(self, theta, nu: int = 1):
        theta = np.asarray(theta, dtype=float)
        total = 0.0
        for k, a in enumerate(self.coeffs):
            p = self.exponent + k
            fac = 1.0
            for i in range(nu):
                fac *= p - i
            total = total + a * fac * theta ** (p - nu)
        return total

    def residual(self, theta):
        """w'' + (lambda - qhat) w for the truncated series."""
        qhat = liouville_qhat(ModeProblem(self.m, self.b), 0)
        return self.derivative(theta, 2) + (self.lam - qhat(theta)) * self(theta)


def _recurrence(laurent, s, order, zero):
    """Frobenius coefficients for w'' = (qhat - lambda) w.

    ``laurent[i]`` multiplies ``theta^(i-2)`` in ``qhat - lambda``.  Returns
    the coefficient list and the resonance order (or None).
    """
    a = [1]
    for k in range(1, order + 1):
        den = (s + k) * (s + k - 1) - laurent[0]
        if den == zero:
            return a, k
        a.append(sum(a[j] * laurent[k - j] for j in range(k)) / den)
    return a, None


def frobenius_expansion(
    problem: ModeProblem, exponent: float, lam: float = 0.0, order: int = 4
) -> FrobeniusExpansion:
    if order < 0:
        raise ValueError("order must be non-negative")
    roots = _indicial_exact(problem.m)
    match = [r for r in roots if abs(float(r) - exponent) <= 1e-12]
    if not match:
        raise ValueError(
            f"exponent {exponent} is not an indicial root {tuple(float(r) for r in roots)}"
        )
    s = match[0]
    sym_laurent = list(_laurent_symbolic(problem.m, max(order - 2, 0)))
    sym_laurent[2] = sym_laurent[2] - LAM
    sym_coeffs, resonance = _recurrence(sym_laurent, s, order, 0)
    sym_coeffs = tuple(sp.factor(sp.expand(c)) for c in sym_coeffs)
    values = {B: problem.b, LAM: lam}
    coeffs = tuple(float(sp.sympify(c).subs(values)) for c in sym_coeffs)
    return FrobeniusExpansion(
        m=problem.m,
        b=problem.b,
        lam=float(lam),
        exponent=float(s),
        coeffs=coeffs,
        symbolic=tuple(sp.sympify(c) for c in sym_coeffs),
        resonance_order=resonance,
        log_case=bool(roots[0] == roots[1]),
    )


def _principal_log_derivative(laurent: list, s: float, lam: float, eps: float, order: int) -> float:
    q = list(laurent)
    q[2] -= lam
    a, _ = _recurrence(q, s, order, 0.0)
    w = sum(ak * eps ** (s + k) for k, ak in enumerate(a))
    dw = sum(ak * (s + k) * eps ** (s + k - 1) for k, ak in enumerate(a))
    return dw / w


def _fd_lowest(qhat: LiouvillePotential, eps: float, n: int, sigma: float) -> float:
    # nodes eps = t_0 < ... < t_n = pi - eps; Robin w'/w = sigma at eps
    # (and the mirrored condition at pi - eps), trapezoid mass at the ends
    h = (math.pi - 2 * eps) / n
    t = eps + h * np.arange(n + 1)
    diag = 2.0 / h**2 + qhat(t)
    diag[0] = diag[-1] = 2.0 * (1.0 + h * sigma) / h**2 + qhat(t[0])
    off = np.full(n, -1.0 / h**2)
    off[0] = off[-1] = -math.sqrt(2.0) / h**2
    w = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0), eigvals_only=True)
    return float(w[0])


def liouville_fd_eigenvalue(
    problem: ModeProblem,
    *,
    eps: float = 0.1,
    n_base: int = 1000,
    levels: int = 3,
    series_order: int = 24,
    max_iter: int = 12,
    tol: float = 1e-12,
) -> float:
    """Lowest eigenvalue of -w'' + qhat w by finite differences.

    Independent of the Galerkin solver.  The interval is cut to
    ``[eps, pi - eps]`` and the Robin condition ``w'/w`` is taken from the
    principal Frobenius solution ``theta^(1/2 + |m|) (1 + ...)``, which
    depends on lambda and is iterated to self-consistency.  Eigenvalues on
    grids ``n_base * 2**i`` are Richardson-extrapolated in ``h^2``.
    """
    qhat = liouville_qhat(problem, series_order)
    laurent = list(qhat.laurent_coeffs)
    s = 0.5 + problem.m_abs
    lam = 0.0
    for _ in range(max_iter):
        sigma = _principal_log_derivative(laurent, s, lam, eps, series_order)
        row = [_fd_lowest(qhat, eps, n_base * 2**i, sigma) for i in range(levels)]
        for p in range(1, levels):
            f = 4.0**p
            row = [(f * row[i + 1] - row[i]) / (f - 1) for i in range(len(row) - 1)]
        lam_new = row[0]
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    return lam
