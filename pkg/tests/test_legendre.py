import math

import numpy as np
import pytest
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly
from scipy.special import lpmv

from robinmag.legendre import BasisSpec, assoc_legendre_normalized, legendre_table
from robinmag.quadrature import gauss_legendre


def rodrigues_oracle(ell, m, x):
    """(1-x^2)^{m/2} d^m/dx^m P_l(x), normalized by exact polynomial integration."""
    c = np.zeros(ell + 1)
    c[ell] = 1
    d = nppoly.polyder(npleg.leg2poly(c), m)
    sq = nppoly.polymul(nppoly.polypow([1.0, 0.0, -1.0], m), nppoly.polymul(d, d))
    antider = nppoly.polyint(sq)
    norm = nppoly.polyval(1.0, antider) - nppoly.polyval(-1.0, antider)
    return (1 - x * x) ** (m / 2) * nppoly.polyval(x, d) / math.sqrt(norm)


def test_constant():
    for x in (-1.0, -0.3, 0.0, 0.9, 1.0):
        assert assoc_legendre_normalized(0, 0, x) == pytest.approx(1 / math.sqrt(2), rel=1e-15)


def test_p11_at_zero():
    assert assoc_legendre_normalized(1, 1, 0.0) == pytest.approx(math.sqrt(3) / 2, rel=1e-15)


def test_p42_matches_rodrigues():
    value = assoc_legendre_normalized(4, 2, 0.3)
    assert value == pytest.approx(rodrigues_oracle(4, 2, 0.3), abs=1e-12)
    assert value == pytest.approx(-0.2823315330090672, abs=1e-12)


@pytest.mark.parametrize("ell,m", [(3, 0), (5, 1), (7, 3), (12, 4), (9, 9)])
@pytest.mark.parametrize("x", [-0.95, -0.2, 0.0, 0.41, 0.999])
def test_against_scipy_lpmv(ell, m, x):
    # scipy includes the Condon-Shortley phase (-1)^m
    norm = math.sqrt((2 * ell + 1) / 2 * math.factorial(ell - m) / math.factorial(ell + m))
    expected = (-1) ** m * norm * lpmv(m, ell, x)
    assert assoc_legendre_normalized(ell, m, x) == pytest.approx(expected, abs=1e-12)


def test_argument_errors():
    with pytest.raises(ValueError):
        assoc_legendre_normalized(1, 2, 0.0)
    with pytest.raises(ValueError):
        assoc_legendre_normalized(2, 1, 1.5)
    with pytest.raises(ValueError):
        legendre_table(-1, 3, 0.0)


@pytest.mark.parametrize("m_abs", range(5))
def test_orthonormality(m_abs):
    rule = gauss_legendre(64)
    table = legendre_table(m_abs, 21, rule.nodes)
    gram = (table * rule.weights) @ table.T
    np.testing.assert_allclose(gram, np.eye(21), atol=1e-12)


@pytest.mark.parametrize("m_abs", range(5))
def test_endpoint_decay(m_abs):
    for sign in (-1, 1):
        for k in range(2, 9):
            x = sign * (1 - 10.0**-k)
            vals = legendre_table(m_abs, 21, x)[:, 0]
            scale = (1 - x * x) ** (m_abs / 2)
            # C bounded by sup of the polynomial factor, at most ~ l^{m+1/2}
            assert np.all(np.abs(vals) <= 1e4 * scale)


def test_positive_near_north_pole():
    vals = legendre_table(3, 10, 1 - 1e-6)[:, 0]
    assert np.all(vals > 0)


def test_basis_spec():
    spec = BasisSpec(2, 5)
    np.testing.assert_array_equal(spec.degrees, [2, 3, 4, 5, 6])
    assert spec.max_degree == 6
    assert spec.evaluate([0.1, 0.2]).shape == (5, 2)
    with pytest.raises(ValueError):
        BasisSpec(1, 0)
