import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from robinmag.quadrature import (
    QuadratureKind,
    gauss_chebyshev2,
    gauss_legendre,
    log_two_integral,
)


def test_gauss_legendre_one_point():
    rule = gauss_legendre(1)
    assert rule.kind is QuadratureKind.GAUSS_LEGENDRE
    np.testing.assert_allclose(rule.nodes, [0.0], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [2.0], rtol=1e-15)


def test_gauss_legendre_two_points():
    rule = gauss_legendre(2)
    np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    np.testing.assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-15)


@pytest.mark.parametrize("n", [0, -3])
def test_rules_reject_nonpositive_n(n):
    with pytest.raises(ValueError):
        gauss_legendre(n)
    with pytest.raises(ValueError):
        gauss_chebyshev2(n)


def test_chebyshev2_closed_forms():
    one = gauss_chebyshev2(1)
    np.testing.assert_allclose(one.nodes, [0.0], atol=1e-16)
    np.testing.assert_allclose(one.weights, [math.pi / 2], rtol=1e-15)
    two = gauss_chebyshev2(2)
    np.testing.assert_allclose(two.nodes, [-0.5, 0.5], rtol=1e-15)
    # (pi/3) sin^2(pi/3) = pi/4 each; the two weights must sum to pi/2
    np.testing.assert_allclose(two.weights, [math.pi / 4] * 2, rtol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 40, 301])
def test_chebyshev2_integrates_semicircle(n):
    assert gauss_chebyshev2(n).weights.sum() == pytest.approx(math.pi / 2, rel=1e-14)


@pytest.mark.parametrize("make", [gauss_legendre, gauss_chebyshev2])
@pytest.mark.parametrize("n", [1, 2, 9, 64, 200])
def test_rule_invariants(make, n):
    rule = make(n)
    assert len(rule) == n
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(np.abs(rule.nodes) < 1)
    assert np.all(rule.weights > 0)
    if make is gauss_legendre:
        assert abs(rule.weights.sum() - 2.0) <= 1e-14


def _monomial_legendre(k):
    return 2.0 / (k + 1) if k % 2 == 0 else 0.0


def _monomial_semicircle(k):
    # int_{-1}^{1} sqrt(1 - x^2) x^k dx = B((k+1)/2, 3/2) for even k
    if k % 2:
        return 0.0
    return math.exp(math.lgamma((k + 1) / 2) + math.lgamma(1.5) - math.lgamma(k / 2 + 2))


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 30),
    seed=st.integers(0, 2**32 - 1),
    kind=st.sampled_from(["legendre", "chebyshev2"]),
)
def test_exactness_random_polynomials(n, seed, kind):
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1, 1, 2 * n)  # degree 2n - 1
    if kind == "legendre":
        rule, moment = gauss_legendre(n), _monomial_legendre
    else:
        rule, moment = gauss_chebyshev2(n), _monomial_semicircle
    exact = sum(c * moment(k) for k, c in enumerate(coeffs))
    approx = rule.integrate(np.polynomial.polynomial.polyval(rule.nodes, coeffs))
    scale = sum(abs(c) * abs(moment(k)) for k, c in enumerate(coeffs)) or 1.0
    assert abs(approx - exact) <= 1e-13 * scale


def test_log_two_golden():
    assert abs(log_two_integral(64) - math.log(2)) <= 1e-10


def test_log_two_matches_iterated_integral_oracle():
    # the iterated integral as written, by adaptive quadrature
    inner = lambda x: math.log(1 / math.tan(x / 2))  # int_x^{pi/2} dt / sin t
    value, _ = integrate.quad(lambda x: math.sin(x) * inner(x), 0, math.pi / 2, epsabs=1e-13)
    dbl, _ = integrate.dblquad(
        lambda t, x: math.sin(x) / math.sin(t), 0, math.pi / 2, lambda x: x, lambda x: math.pi / 2,
        epsabs=1e-12,
    )
    assert value == pytest.approx(math.log(2), abs=1e-12)
    assert dbl == pytest.approx(log_two_integral(64), abs=1e-9)
