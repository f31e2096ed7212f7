"""Orthonormal associated Legendre functions.

``P~_l^m(x)`` is normalized in L^2(-1, 1) and carries no Condon-Shortley
phase, so every function is positive near ``x = 1``.  Under ``x = cos(theta)``
the family for fixed ``m`` spans exactly the functions vanishing like
``sin(theta)**m`` at both poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["BasisSpec", "assoc_legendre_normalized", "legendre_table"]


@dataclass(frozen=True)
class BasisSpec:
    """Degrees ``m_abs, ..., m_abs + n_funcs - 1`` of order ``m_abs``."""

    m_abs: int
    n_funcs: int

    def __post_init__(self):
        if self.m_abs < 0:
            raise ValueError("m_abs must be non-negative")
        if self.n_funcs < 1:
            raise ValueError("n_funcs must be positive")

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(self.m_abs, self.m_abs + self.n_funcs)

    @property
    def max_degree(self) -> int:
        return self.m_abs + self.n_funcs - 1

    def evaluate(self, x) -> np.ndarray:
        """Table of shape ``(n_funcs, len(x))``."""
        return legendre_table(self.m_abs, self.n_funcs, x)


def _seed(m_abs: int, x: np.ndarray) -> np.ndarray:
    # P~_m^m = sqrt((2m+1)!! / (2 (2m)!!)) (1 - x^2)^(m/2)
    c = math.sqrt(0.5)
    for k in range(1, m_abs + 1):
        c *= math.sqrt((2 * k + 1) / (2 * k))
    s = np.sqrt((1.0 - x) * (1.0 + x))
    return c * s**m_abs


def legendre_table(m_abs: int, n_funcs: int, x) -> np.ndarray:
    """Rows ``P~_l^{m_abs}(x)`` for ``l = m_abs .. m_abs + n_funcs - 1``.

    Upward three-term recurrence in ``l`` from the closed-form seed.
    """
    if m_abs < 0:
        raise ValueError("m_abs must be non-negative")
    if n_funcs < 1:
        raise ValueError("n_funcs must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > 1.0):
        raise ValueError("Legendre functions are evaluated on [-1, 1] only")
    m = m_abs
    out = np.empty((n_funcs, x.size))
    out[0] = _seed(m, x)
    if n_funcs > 1:
        out[1] = math.sqrt(2 * m + 3) * x * out[0]
    for i in range(2, n_funcs):
        ell = m + i
        a = math.sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
        b = math.sqrt(((ell - 1) ** 2 - m * m) / (4 * (ell - 1) ** 2 - 1))
        out[i] = a * (x * out[i - 1] - b * out[i - 2])
    return out


def assoc_legendre_normalized(ell: int, m_abs: int, x: float) -> float:
    if m_abs < 0 or ell < m_abs:
        raise ValueError(f"need 0 <= m_abs <= ell, got ell={ell}, m_abs={m_abs}")
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [-1, 1], got {x}")
    return float(legendre_table(m_abs, ell - m_abs + 1, x)[-1, 0])
