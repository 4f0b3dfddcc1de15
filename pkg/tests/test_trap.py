import io
import math

import numpy as np
import pytest

from penningryd.constants import CONST
from penningryd.hamiltonian import PaschenBackLabel
from penningryd.trap import (
    TrapConfig,
    confinement_frequencies,
    coupling_corrections,
    export_corrections,
)


@pytest.fixture(scope="module")
def trap_ca(ca40):
    return TrapConfig.for_species(ca40, b_tesla=2.0, beta=7e5)


def test_axial_frequency_closed_form(ca40):
    trap = TrapConfig.for_species(ca40, b_tesla=2.0, beta=7e5)
    f = confinement_frequencies(trap)
    wz_expected = math.sqrt(4.0 * CONST.e * trap.beta / trap.mass_kg)
    wc_expected = CONST.e * trap.b_tesla / trap.mass_kg
    assert f.omega_z == pytest.approx(wz_expected, rel=1e-12)
    assert f.omega_c == pytest.approx(wc_expected, rel=1e-12)
    assert f.stable


def test_radial_frequency_identity(ca40):
    # omega_c^2 = 4 omega_rho^2 + 2 omega_z^2 for the single-ion trap
    f = confinement_frequencies(TrapConfig.for_species(ca40, 1.85, 7e5))
    assert f.omega_c**2 == pytest.approx(
        4.0 * f.omega_rho**2 + 2.0 * f.omega_z**2, rel=1e-12
    )


def test_axial_scaling_with_gradient(ca40):
    f1 = confinement_frequencies(TrapConfig.for_species(ca40, 2.0, 4e5))
    f2 = confinement_frequencies(TrapConfig.for_species(ca40, 2.0, 1.6e6))
    assert f2.omega_z == pytest.approx(2.0 * f1.omega_z, rel=1e-12)


def test_instability_flagged(ca40):
    # axial confinement too strong for the magnetic field
    f = confinement_frequencies(TrapConfig.for_species(ca40, 0.1, 7e5))
    assert not f.stable


def test_trap_config_validation(ca40):
    with pytest.raises(ValueError):
        TrapConfig(b_tesla=-1.0, beta=7e5, mass_kg=ca40.mass_kg)
    with pytest.raises(ValueError):
        TrapConfig(b_tesla=2.0, beta=7e5, mass_kg=-1.0)


def test_corrections_small_for_low_rydberg(track30, trap_ca):
    target = PaschenBackLabel(30, 0, 0, -0.5)
    corr = coupling_corrections(track30, target, trap_ca)
    for rel in (
        corr.d_omega_rho_rel,
        corr.d_omega_z_rel,
        corr.d_omega_c_rel,
        corr.d_mass_rel,
    ):
        assert abs(rel) < 1e-3


def test_nearest_state_agrees_with_full_sum(track30, trap_ca):
    target = PaschenBackLabel(30, 0, 0, -0.5)
    near = coupling_corrections(track30, target, trap_ca, mode="nearest-state")
    full = coupling_corrections(track30, target, trap_ca, mode="full-sum")
    assert near.mode == "nearest-state"
    assert full.mode == "full-sum"
    # the same-n P manifold dominates the second-order sum
    assert near.d_mass == pytest.approx(full.d_mass, rel=0.25)
    assert near.d_omega_z == pytest.approx(full.d_omega_z, rel=0.25)


def test_corrections_mode_validation(track30, trap_ca):
    with pytest.raises(ValueError):
        coupling_corrections(track30, PaschenBackLabel(30, 0, 0, -0.5), trap_ca, mode="bogus")
    with pytest.raises(ValueError):
        coupling_corrections(
            track30, PaschenBackLabel(30, 1, 0, -0.5), trap_ca, mode="nearest-state"
        )


def test_export_corrections_format(track30, trap_ca):
    target = PaschenBackLabel(30, 0, 0, -0.5)
    corr = coupling_corrections(track30, target, trap_ca)
    buf = io.StringIO()
    export_corrections([(30, trap_ca, corr)], buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "n,B_tesla,beta,dwr_rel,dwz_rel,dwc_rel,dM_rel,mode"
    assert len(lines) == 2
    assert lines[1].endswith("full-sum")
