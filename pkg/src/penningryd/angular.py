"""Angular matrix elements on the |l, m_l> and |l, j, m_j> bases.

Closed-form elements (Condon-Shortley phases) of the operators that
appear in the internal Hamiltonian and in the motional-coupling sums:

* cos(theta)            dipole coupling along the field axis, dl = +/-1
* C^1_q, q in {-1,0,1}  renormalized spherical harmonic components
* cos^2(theta)          building block of the quadrupole operators, dl in {0,+/-2}
* sin^2(theta)          diamagnetic rho^2/r^2 factor
* 1 - 3 cos^2(theta)    quadrupole (rho^2 - 2 z^2)/r^2 factor

plus the spin-orbit recoupling coefficients between |l, j, m_j> and the
uncoupled |l, m_l, m_s> states for s = 1/2.
"""

from __future__ import annotations

import math


def ls_coupling_coefficients(l: int, j: float, m_j: float) -> tuple[float, float]:
    """Amplitudes (c_up, c_down) of the uncoupled states
    |m_l = m_j - 1/2, m_s = +1/2> and |m_l = m_j + 1/2, m_s = -1/2>
    in |l, j, m_j>, for s = 1/2."""
    if abs(m_j) > j + 1e-12:
        raise ValueError(f"|m_j| = {abs(m_j)} exceeds j = {j}")
    two_l1 = 2 * l + 1
    a = (l + m_j + 0.5) / two_l1
    b = (l - m_j + 0.5) / two_l1
    if abs(j - (l + 0.5)) < 1e-12:
        return math.sqrt(a), math.sqrt(b)
    if abs(j - (l - 0.5)) < 1e-12:
        return -math.sqrt(b), math.sqrt(a)
    raise ValueError(f"j must be l +/- 1/2, got l={l}, j={j}")


def _valid(l: int, m: float) -> bool:
    return abs(m) <= l + 1e-12


def cos_theta_element(l_bra: int, m_bra: int, l_ket: int, m_ket: int) -> float:
    """<l_bra, m_bra| cos(theta) |l_ket, m_ket>; nonzero iff m conserved
    and l changes by one."""
    if m_bra != m_ket or not (_valid(l_bra, m_bra) and _valid(l_ket, m_ket)):
        return 0.0
    m = m_ket
    if l_bra == l_ket + 1:
        l = l_ket
        return math.sqrt(((l + 1) ** 2 - m * m) / ((2 * l + 1) * (2 * l + 3)))
    if l_bra == l_ket - 1:
        return cos_theta_element(l_ket, m_ket, l_bra, m_bra)
    return 0.0


def c1_element(l_bra: int, m_bra: int, q: int, l_ket: int, m_ket: int) -> float:
    """<l_bra, m_bra| C^1_q |l_ket, m_ket> with C^1_q = sqrt(4 pi / 3) Y_1q."""
    if q not in (-1, 0, 1):
        raise ValueError(f"q must be -1, 0 or 1, got {q}")
    if q == 0:
        return cos_theta_element(l_bra, m_bra, l_ket, m_ket)
    if m_bra != m_ket + q or not (_valid(l_bra, m_bra) and _valid(l_ket, m_ket)):
        return 0.0
    l, m = l_ket, m_ket
    if l_bra == l + 1:
        if q == 1:
            return math.sqrt((l + m + 1) * (l + m + 2) / (2 * (2 * l + 1) * (2 * l + 3)))
        return math.sqrt((l - m + 1) * (l - m + 2) / (2 * (2 * l + 1) * (2 * l + 3)))
    if l_bra == l - 1:
        if q == 1:
            return -math.sqrt((l - m) * (l - m - 1) / (2 * (2 * l - 1) * (2 * l + 1)))
        return -math.sqrt((l + m) * (l + m - 1) / (2 * (2 * l - 1) * (2 * l + 1)))
    return 0.0


def cos2_theta_element(l_bra: int, m_bra: int, l_ket: int, m_ket: int) -> float:
    """<l_bra, m_bra| cos^2(theta) |l_ket, m_ket> by resolving the identity
    over the two intermediate l +/- 1 ladders; exact, no truncation."""
    if m_bra != m_ket:
        return 0.0
    if abs(l_bra - l_ket) not in (0, 2):
        return 0.0
    total = 0.0
    for l_mid in (l_ket - 1, l_ket + 1):
        if l_mid < 0:
            continue
        total += cos_theta_element(l_bra, m_bra, l_mid, m_ket) * cos_theta_element(
            l_mid, m_ket, l_ket, m_ket
        )
    return total


def sin2_theta_element(l_bra: int, m_bra: int, l_ket: int, m_ket: int) -> float:
    """<l_bra, m_bra| sin^2(theta) |l_ket, m_ket>."""
    diag = 1.0 if (l_bra == l_ket and m_bra == m_ket) else 0.0
    return diag - cos2_theta_element(l_bra, m_bra, l_ket, m_ket)


def quadrupole_angular_element(l_bra: int, m_bra: int, l_ket: int, m_ket: int) -> float:
    """<l_bra, m_bra| 1 - 3 cos^2(theta) |l_ket, m_ket>, the angular factor
    of (rho^2 - 2 z^2)/r^2."""
    diag = 1.0 if (l_bra == l_ket and m_bra == m_ket) else 0.0
    return diag - 3.0 * cos2_theta_element(l_bra, m_bra, l_ket, m_ket)
