"""Gauss quadrature rules on (-1, 1)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureKind",
    "QuadratureRule",
    "gauss_legendre",
    "gauss_chebyshev2",
    "quadrature_order",
    "log_two_integral",
]


class QuadratureKind(enum.Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    GAUSS_CHEBYSHEV2 = "gauss-chebyshev2"


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of an n-point rule.

    Gauss-Legendre integrates ``p(x)`` exactly, Gauss-Chebyshev of the second
    kind integrates ``sqrt(1 - x**2) * p(x)`` exactly, for ``deg p <= 2n - 1``.
    """

    kind: QuadratureKind
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> float:
        """Apply the rule to samples of the integrand at ``self.nodes``."""
        return float(np.dot(self.weights, values))


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"number of nodes must be a positive integer, got {n!r}")
    return int(n)


def gauss_legendre(n: int) -> QuadratureRule:
    n = _check_n(n)
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(QuadratureKind.GAUSS_LEGENDRE, x, w)


def gauss_chebyshev2(n: int) -> QuadratureRule:
    n = _check_n(n)
    # ascending order: k runs n..1
    angles = np.arange(n, 0, -1) * (math.pi / (n + 1))
    x = np.cos(angles)
    w = (math.pi / (n + 1)) * np.sin(angles) ** 2
    return QuadratureRule(QuadratureKind.GAUSS_CHEBYSHEV2, x, w)


def quadrature_order(max_degree: int) -> int:
    """Default number of nodes for a basis whose top Legendre degree is ``max_degree``."""
    return 2 * max_degree + 16


def log_two_integral(n: int = 64) -> float:
    """Evaluate int_0^{pi/2} sin x (int_x^{pi/2} dt / sin t) dx, which equals ln 2.

    Swapping the order of integration collapses the iterated integral to
    int_0^{pi/2} (1 - cos t) / sin t dt = int_0^{pi/2} tan(t/2) dt,
    a smooth integrand handled by an n-point Gauss-Legendre rule.
    """
    rule = gauss_legendre(n)
    half = math.pi / 4
    t = half * (rule.nodes + 1.0)
    return half * rule.integrate(np.tan(t / 2))
