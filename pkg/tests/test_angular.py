import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import lpmv

from penningryd.angular import (
    c1_element,
    cos2_theta_element,
    cos_theta_element,
    ls_coupling_coefficients,
    quadrupole_angular_element,
    sin2_theta_element,
)


def _theta_part(l, m, u):
    """Normalized theta factor of Y_lm evaluated at u = cos(theta)."""
    norm = math.sqrt(
        (2 * l + 1) / 2.0 * math.factorial(l - abs(m)) / math.factorial(l + abs(m))
    )
    val = norm * lpmv(abs(m), l, u)
    if m < 0 and m % 2:
        val = -val
    return val


def _quadrature(l_bra, m, l_ket, f):
    out, _ = quad(
        lambda u: _theta_part(l_bra, m, u) * f(u) * _theta_part(l_ket, m, u),
        -1.0,
        1.0,
        limit=200,
    )
    return out


@pytest.mark.parametrize("l,m", [(0, 0), (1, 0), (1, 1), (3, -2), (5, 4)])
def test_cos_theta_against_closed_form(l, m):
    expected = math.sqrt(((l + 1) ** 2 - m**2) / ((2 * l + 1) * (2 * l + 3)))
    assert cos_theta_element(l + 1, m, l, m) == pytest.approx(expected, rel=1e-12)
    assert cos_theta_element(l, m, l + 1, m) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("l_bra,l_ket,m", [(1, 0, 0), (2, 1, 1), (4, 3, -2), (3, 3, 2), (5, 3, 0)])
def test_cos_and_cos2_against_quadrature(l_bra, l_ket, m):
    if abs(m) <= min(l_bra, l_ket):
        got = cos_theta_element(l_bra, m, l_ket, m)
        assert got == pytest.approx(_quadrature(l_bra, m, l_ket, lambda u: u), abs=1e-10)
        got2 = cos2_theta_element(l_bra, m, l_ket, m)
        assert got2 == pytest.approx(_quadrature(l_bra, m, l_ket, lambda u: u * u), abs=1e-10)


@given(l=st.integers(0, 8), dm=st.integers(-8, 8), l2=st.integers(0, 8))
def test_cos_theta_selection_rules(l, dm, l2):
    m = max(-l, min(l, dm))
    if abs(m) > l2:
        return
    val = cos_theta_element(l, m, l2, m)
    if abs(l - l2) != 1:
        assert val == 0.0


@given(l=st.integers(1, 8), frac=st.floats(0.0, 1.0))
def test_cos2_by_resolution_of_identity(l, frac):
    m = int(round(frac * l))
    total = sum(
        cos_theta_element(l, m, lp, m) ** 2
        for lp in (l - 1, l + 1)
        if abs(m) <= lp
    )
    assert cos2_theta_element(l, m, l, m) == pytest.approx(total, rel=1e-12)


@given(l=st.integers(0, 8))
def test_sin2_complements_cos2_on_diagonal(l):
    for m in range(-l, l + 1):
        s2 = sin2_theta_element(l, m, l, m)
        c2 = cos2_theta_element(l, m, l, m)
        assert s2 + c2 == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("l_bra,l_ket,m", [(2, 0, 0), (2, 2, 1), (3, 1, -1), (4, 4, 3)])
def test_quadrupole_against_quadrature(l_bra, l_ket, m):
    # angular factor of (rho^2 - 2 z^2)/r^2
    got = quadrupole_angular_element(l_bra, m, l_ket, m)
    want = _quadrature(l_bra, m, l_ket, lambda u: 1.0 - 3.0 * u * u)
    assert got == pytest.approx(want, abs=1e-10)


def test_c1_q0_matches_cos_theta():
    for l in range(4):
        for m in range(-l, l + 1):
            assert c1_element(l + 1, m, 0, l, m) == pytest.approx(
                cos_theta_element(l + 1, m, l, m), rel=1e-12
            )


@given(l=st.integers(0, 10), frac=st.floats(0.0, 1.0))
def test_ls_coefficients_normalized(l, frac):
    j = l + 0.5
    m_j = -j + round(frac * 2 * j)
    a, b = ls_coupling_coefficients(l, j, m_j)
    assert a * a + b * b == pytest.approx(1.0, rel=1e-12)
    # stretched state is a pure product state
    a_max, b_max = ls_coupling_coefficients(l, j, j)
    assert abs(a_max) == pytest.approx(1.0, rel=1e-12)
    assert b_max == pytest.approx(0.0, abs=1e-12)


def test_ls_coefficients_closed_form():
    # j = l + 1/2: amplitude of |m_l = m_j - 1/2, up> is
    # sqrt((l + m_j + 1/2)/(2l + 1))
    l, m_j = 2, 0.5
    a, b = ls_coupling_coefficients(l, l + 0.5, m_j)
    assert abs(a) == pytest.approx(math.sqrt((l + m_j + 0.5) / (2 * l + 1)), rel=1e-12)
