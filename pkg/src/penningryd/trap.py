"""External-motion frequencies and Rydberg-state corrections to them.

A single ion of mass M and charge e in a homogeneous B field plus an
electric quadrupole of gradient beta oscillates (in the frame rotating
at omega_c/2) at

    omega_z = sqrt(4 e beta / M),  omega_c = e B / M,
    omega_rho = (1/2) sqrt(omega_c^2 - 2 omega_z^2),

stable radially only for omega_c > sqrt(2) omega_z.  When the ion is
Rydberg-excited, second-order coupling between the electron and the
center of mass produces state-dependent shifts of the trap frequencies,
the cyclotron frequency, and the effective mass; these are evaluated
here either from the closed nS <-> nP forms or as a sum over a full
tracked basis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .angular import c1_element
from .constants import CONST
from .hamiltonian import AdiabaticTrack, PaschenBackLabel
from .radial import radial_integral
from .species import SpeciesParams

# PT denominators closer than this (relative to the target's binding
# energy) are intrinsic near-degeneracies; the term is dropped, not summed
DEGENERACY_THRESHOLD = 1e-6


@dataclass(frozen=True)
class TrapConfig:
    b_tesla: float
    beta: float                 # V/m^2
    mass_kg: float

    def __post_init__(self):
        if self.b_tesla <= 0 or self.beta <= 0 or self.mass_kg <= 0:
            raise ValueError("B, beta and M must all be positive")

    @classmethod
    def for_species(cls, species: SpeciesParams, b_tesla: float, beta: float) -> "TrapConfig":
        return cls(b_tesla=b_tesla, beta=beta, mass_kg=species.mass_kg)


@dataclass(frozen=True)
class TrapFrequencies:
    """Angular frequencies in rad/s; stable means omega_rho real positive."""

    omega_z: float
    omega_c: float
    omega_rho: float
    stable: bool


def confinement_frequencies(trap: TrapConfig) -> TrapFrequencies:
    omega_z = math.sqrt(4.0 * CONST.e * trap.beta / trap.mass_kg)
    omega_c = CONST.e * trap.b_tesla / trap.mass_kg
    disc = omega_c**2 - 2.0 * omega_z**2
    if disc > 0:
        return TrapFrequencies(omega_z, omega_c, 0.5 * math.sqrt(disc), True)
    return TrapFrequencies(omega_z, omega_c, 0.0, False)


@dataclass(frozen=True)
class CouplingCorrections:
    """State-dependent external-motion modifications.

    m_tilde, w2_rho, w2_z, w_c are the raw second-order coefficients
    (kg, rad^2/s^2, rad^2/s^2, rad/s); the d* fields are the derived
    shifts d_omega = w2/(2 omega), d_omega_c = w_c, d_mass =
    M^2/(M + m_tilde), and *_rel their ratios to the bare values.
    """

    m_tilde: float
    w2_rho: float
    w2_z: float
    w_c: float
    d_omega_rho: float
    d_omega_z: float
    d_omega_c: float
    d_mass: float
    d_omega_rho_rel: float
    d_omega_z_rel: float
    d_omega_c_rel: float
    d_mass_rel: float
    mode: str
    excluded_terms: int


def _perp_weight(l_a: int, ml_a: int, l_b: int, ml_b: int) -> float:
    """Angular weight of the transverse (x X + y Y type) coupling between
    |l_a, ml_a> and |l_b, ml_b>, normalized so the nS <-> nP manifold sum
    gives the closed-form 1/3 bookkeeping."""
    total = 0.0
    for q in (-1, 1):
        total += c1_element(l_a, ml_a, q, l_b, ml_b) ** 2
    return 0.5 * total


def _axial_weight(l_a: int, ml_a: int, l_b: int, ml_b: int) -> float:
    return c1_element(l_a, ml_a, 0, l_b, ml_b) ** 2


def coupling_corrections(
    track: AdiabaticTrack,
    target: PaschenBackLabel,
    trap: TrapConfig,
    mode: str = "full-sum",
) -> CouplingCorrections:
    """Second-order mass/frequency corrections for one tracked state.

    ``mode='nearest-state'`` restricts the perturbative sum to the
    same-n P manifold (valid for S targets); ``mode='full-sum'`` runs
    over every tracked partner with |l - l'| = 1 and conserved spin.
    Near-degenerate denominators are excluded with a warning and counted
    in ``excluded_terms``.
    """
    if mode not in ("nearest-state", "full-sum"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "nearest-state" and target.l != 0:
        raise ValueError("nearest-state mode requires an S (l = 0) target")

    basis = track.basis
    b = trap.b_tesla
    beta = trap.beta
    mass = trap.mass_kg
    e = CONST.e
    e_target = track.energy(target, b) * CONST.hartree

    def radial_state(n: int, l: int):
        return basis.radial[(n, l, l + 0.5)]

    s_perp = 0.0
    s_axial = 0.0
    excluded = 0
    for partner in track.labels:
        if partner == target or partner.m_s != target.m_s:
            continue
        if abs(partner.l - target.l) != 1:
            continue
        if abs(partner.m_l - target.m_l) > 1:
            continue
        if mode == "nearest-state" and not (
            partner.n == target.n and partner.l == 1
        ):
            continue
        a_perp = _perp_weight(target.l, target.m_l, partner.l, partner.m_l)
        a_axial = _axial_weight(target.l, target.m_l, partner.l, partner.m_l)
        if a_perp == 0.0 and a_axial == 0.0:
            continue
        de = track.energy(partner, b) * CONST.hartree - e_target
        if abs(de) < DEGENERACY_THRESHOLD * abs(e_target):
            warnings.warn(
                f"excluding near-degenerate partner {partner} of {target} "
                f"(|dE| = {abs(de):.3e} J)",
                stacklevel=2,
            )
            excluded += 1
            continue
        r_el = radial_integral(
            radial_state(target.n, target.l), radial_state(partner.n, partner.l), 1
        ) * CONST.a0
        s_perp += a_perp * r_el**2 / de
        s_axial += a_axial * r_el**2 / de

    c_rho = 2.0 * e * beta - e**2 * b**2 / (2.0 * mass)
    w2_rho = -(c_rho**2 / mass) * s_perp
    w2_z = -(32.0 * e**2 * beta**2 / mass) * s_axial
    w_c = -(2.0 * e * b / mass) * (4.0 * e * beta - e**2 * b**2 / mass) * s_perp
    m_tilde = -(mass**2 / (e**2 * b**2)) / s_perp if s_perp != 0.0 else math.inf

    freqs = confinement_frequencies(trap)
    d_rho = w2_rho / (2.0 * freqs.omega_rho) if freqs.omega_rho > 0 else math.nan
    d_z = w2_z / (2.0 * freqs.omega_z)
    d_mass = mass**2 / (mass + m_tilde) if math.isfinite(m_tilde) else 0.0
    return CouplingCorrections(
        m_tilde=m_tilde,
        w2_rho=w2_rho,
        w2_z=w2_z,
        w_c=w_c,
        d_omega_rho=d_rho,
        d_omega_z=d_z,
        d_omega_c=w_c,
        d_mass=d_mass,
        d_omega_rho_rel=d_rho / freqs.omega_rho if freqs.omega_rho > 0 else math.nan,
        d_omega_z_rel=d_z / freqs.omega_z,
        d_omega_c_rel=w_c / freqs.omega_c,
        d_mass_rel=d_mass / mass,
        mode=mode,
        excluded_terms=excluded,
    )


def export_corrections(rows, fh) -> None:
    """Write `(n, trap, corrections)` tuples as delimiter-separated rows
    `n, B_tesla, beta, dwr_rel, dwz_rel, dwc_rel, dM_rel, mode`."""
    fh.write("n,B_tesla,beta,dwr_rel,dwz_rel,dwc_rel,dM_rel,mode\n")
    for n, trap, corr in rows:
        fh.write(
            f"{n},{trap.b_tesla:.9g},{trap.beta:.9g},"
            f"{corr.d_omega_rho_rel:.6e},{corr.d_omega_z_rel:.6e},"
            f"{corr.d_omega_c_rel:.6e},{corr.d_mass_rel:.6e},{corr.mode}\n"
        )
