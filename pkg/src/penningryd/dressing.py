"""Microwave-dressed state pairs and dipolar interaction strengths.

A near-resonant microwave couples the nS and nP Rydberg states into a
dressed pair |+>, |->; the lower state combined with the electronic
ground state forms an effective two-level system whose dipole moment
scales with <S|z|P>.  Two such ions interact via the dipole-dipole
potential V = e^2 d^2 (1 - 3 cos^2 theta) / (4 pi eps0 R^3), reported
here both as an energy and in frequency views (rad/s and ordinary Hz)
because the two conventions differ by 2 pi.

Sign convention: the microwave coupling is taken as +Omega/2 on the
off-diagonal, so on resonance the lower dressed state is the
antisymmetric combination (|P> - |S>)/sqrt(2).  The opposite phase
choice only flips the sign of the S amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONST
from .crystal import Equilibrium, PLANAR_RATIO_N3, triangle_side
from .hamiltonian import AdiabaticTrack, PaschenBackLabel, dipole_element


class DressingError(ValueError):
    pass


@dataclass(frozen=True)
class DriveParams:
    """Microwave and laser drive parameters, all angular frequencies."""

    omega_mw: float
    omega_l: float
    delta_mw: float
    delta_l: float

    def __post_init__(self):
        for name in ("omega_mw", "omega_l", "delta_mw", "delta_l"):
            if not math.isfinite(getattr(self, name)):
                raise DressingError(f"{name} must be finite")
        if self.omega_mw < 0:
            raise DressingError("omega_mw must be non-negative (phase absorbed)")

    @property
    def effective_rabi(self) -> float:
        """Laser drive of the dressed two-level system, Omega_L/(2 sqrt 2)."""
        return self.omega_l / (2.0 * math.sqrt(2.0))


@dataclass(frozen=True)
class DressedPair:
    """Eigenpair of the 2x2 microwave block.

    c_plus/c_minus follow the closed form +-sqrt(1 +- Dmw/W) with
    W = sqrt(Dmw^2 + Omw^2), normalized so (c+^2 + c-^2)/2 = 1.
    ``upper``/``lower`` are the (S, P) amplitude pairs of |+> and |->.
    """

    c_plus: float
    c_minus: float
    delta_plus: float
    delta_minus: float
    upper: tuple[float, float]
    lower: tuple[float, float]


def dressed_states(delta_mw: float, omega_mw: float, delta_l: float = 0.0) -> DressedPair:
    """Diagonalize the microwave-coupled {S, P} block.

    Detunings are measured from the laser-rotated frame; the returned
    eigen-detunings are delta_l + (delta_mw +- W)/2.
    """
    if omega_mw < 0:
        raise DressingError("omega_mw must be non-negative")
    if delta_mw == 0.0 and omega_mw == 0.0:
        raise DressingError("degenerate input: both detuning and coupling vanish")
    w = math.hypot(delta_mw, omega_mw)
    x = delta_mw / w
    c_plus = math.sqrt(1.0 + x)
    c_minus = -math.sqrt(1.0 - x)
    delta_plus = delta_l + 0.5 * (delta_mw + w)
    delta_minus = delta_l + 0.5 * (delta_mw - w)
    # amplitude pairs (S, P); lower state antisymmetric on resonance
    sq2 = math.sqrt(2.0)
    upper = (-c_minus / sq2, c_plus / sq2)
    lower = (-c_plus / sq2, -c_minus / sq2)
    return DressedPair(c_plus, c_minus, delta_plus, delta_minus, upper, lower)


@dataclass(frozen=True)
class PairInteraction:
    """Dipole-dipole interaction of one ion pair.

    ``dipole`` is the z matrix element in metres (charge factored out);
    ``energy`` in joules, ``omega`` = energy/hbar in rad/s, ``nu`` =
    energy/h in Hz.
    """

    separation: float
    theta: float
    dipole: float
    angular_factor: float
    energy: float
    omega: float
    nu: float


def pair_interaction(dipole_m: float, r_m: float, theta: float = math.pi / 2) -> PairInteraction:
    """Evaluate V = e^2 d^2 (1 - 3 cos^2 theta)/(4 pi eps0 R^3)."""
    if r_m <= 0:
        raise DressingError(f"separation must be positive, got {r_m}")
    factor = 1.0 - 3.0 * math.cos(theta) ** 2
    energy = CONST.coulomb * dipole_m**2 * factor / r_m**3
    return PairInteraction(
        separation=r_m,
        theta=theta,
        dipole=dipole_m,
        angular_factor=factor,
        energy=energy,
        omega=energy / CONST.hbar,
        nu=energy / CONST.h,
    )


@dataclass(frozen=True)
class V0Point:
    b_tesla: float
    n: int
    wz_over_wr: float
    omega_rho: float
    r0: float
    dipole: float
    v0_energy: float
    v0_omega: float
    v0_nu: float
    planar_ok: bool


def confinement_at_fixed_ratio(
    b_tesla: float, mass_kg: float, wz_over_wr: float
) -> tuple[float, float, float]:
    """(omega_rho, omega_z, beta) for a given B at fixed omega_z/omega_rho.

    From omega_c^2 = 4 omega_rho^2 + 2 omega_z^2 the radial frequency is
    omega_c / sqrt(4 + 2 k^2) with k the requested ratio."""
    if b_tesla <= 0 or wz_over_wr <= 0:
        raise DressingError("B and the frequency ratio must be positive")
    omega_c = CONST.e * b_tesla / mass_kg
    omega_rho = omega_c / math.sqrt(4.0 + 2.0 * wz_over_wr**2)
    omega_z = wz_over_wr * omega_rho
    beta = mass_kg * omega_z**2 / (4.0 * CONST.e)
    return omega_rho, omega_z, beta


def v0_of_b(
    track: AdiabaticTrack,
    mass_kg: float,
    wz_over_wr: float,
    b_values=None,
    m_s: float = -0.5,
) -> list[V0Point]:
    """Triangular-crystal interaction strength along a magnetic sweep.

    Pairs the B-dependent S-P dipole element of the tracked spectrum
    with the B-dependent triangle side R0 at fixed omega_z/omega_rho.
    Points where three-ion planarity fails are flagged, not dropped.
    """
    n = track.basis.n
    s_label = PaschenBackLabel(n, 0, 0, m_s)
    p_label = PaschenBackLabel(n, 1, 0, m_s)
    if b_values is None:
        b_values = track.b_values
    out = []
    planar_ok = wz_over_wr >= PLANAR_RATIO_N3
    for b in np.atleast_1d(np.asarray(b_values, dtype=float)):
        omega_rho, omega_z, _ = confinement_at_fixed_ratio(float(b), mass_kg, wz_over_wr)
        r0 = triangle_side(mass_kg, omega_rho)
        d = abs(dipole_element(track, s_label, p_label, float(b))) * CONST.a0
        pi = pair_interaction(d, r0, math.pi / 2)
        out.append(
            V0Point(
                b_tesla=float(b),
                n=n,
                wz_over_wr=wz_over_wr,
                omega_rho=omega_rho,
                r0=r0,
                dipole=d,
                v0_energy=pi.energy,
                v0_omega=pi.omega,
                v0_nu=pi.nu,
                planar_ok=planar_ok,
            )
        )
    return out


def charge_dipole_coefficients(eq: Equilibrium, dipole_m: float) -> np.ndarray:
    """Per ordered pair coefficient e^2 d cos(theta_ij)/(4 pi eps0 R_ij^2)
    in joules; antisymmetric in (i, j), identically zero for planar
    crystals."""
    n = eq.n_ions
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            r = eq.separation(i, j)
            out[i, j] = CONST.coulomb * dipole_m * math.cos(eq.theta(i, j)) / r**2
    return out


def quadrupole_gradient_shift(r0: float) -> float:
    """Electric-field gradient e/(4 pi eps0 R0^3) (V/m^2) induced on one
    ion by the quadrupole moment of a Rydberg neighbor at distance R0."""
    if r0 <= 0:
        raise DressingError(f"separation must be positive, got {r0}")
    return CONST.e / (4.0 * math.pi * CONST.eps0 * r0**3)


def export_v0(points: list[V0Point], fh) -> None:
    fh.write("B_tesla,n,wz_over_wr,V0_MHz,planar_ok\n")
    for p in points:
        fh.write(
            f"{p.b_tesla:.9g},{p.n},{p.wz_over_wr:.9g},"
            f"{p.v0_nu / 1e6:.9g},{int(p.planar_ok)}\n"
        )
