import io
import math

import numpy as np
import pytest

from penningryd.constants import CONST
from penningryd.hamiltonian import (
    BasisSet,
    FieldPoint,
    PaschenBackLabel,
    dipole_element,
    export_spectrum,
    ionization_gradient,
    ionization_n,
    landau_threshold_field,
    landau_threshold_n,
    quadrupole_dominance_gradient,
    sweep_and_track,
)


@pytest.fixture(scope="module")
def basis18(ca40):
    return BasisSet(ca40, 30, l_max=2)


@pytest.fixture(scope="module")
def track18(basis18):
    return sweep_and_track(basis18, [0.5, 1.0, 1.5, 2.0])


def test_basis_dimensions(basis18, basis30):
    assert basis18.dim == 18
    assert basis30.dim == 126
    assert len(basis30.labels) == 126


def test_basis_rejects_too_small_n(ca40):
    with pytest.raises(ValueError):
        BasisSet(ca40, 6, l_max=5)


def test_field_point_atomic_units():
    p = FieldPoint(2.0, 1e6)
    assert p.b_au == pytest.approx(2.0 / CONST.b_atomic, rel=1e-12)
    assert p.beta_au == pytest.approx(1e6 / CONST.gradient_atomic, rel=1e-12)


def test_coupling_matrices_symmetric(basis18):
    for mat in (
        basis18.zeeman_matrix(1.0),
        basis18.diamagnetic_matrix(1.0),
        basis18.quadrupole_matrix(1e6),
        basis18.z_dipole_matrix(),
    ):
        assert np.array_equal(mat, mat.T)


def test_assemble_is_linear_combination(basis18):
    p = FieldPoint(1.3, 7e5)
    h = basis18.assemble(p)
    h0 = basis18.assemble(FieldPoint(0.0, 0.0))
    parts = (
        h0
        + basis18.zeeman_matrix(p.b_tesla)
        + basis18.diamagnetic_matrix(p.b_tesla)
        + basis18.quadrupole_matrix(p.beta)
    )
    assert np.allclose(h, parts, rtol=0, atol=1e-18)


def test_mj_block_structure(basis18):
    h = basis18.assemble(FieldPoint(1.5, 1e6))
    mj = np.array([lab.m_j for lab in basis18.labels])
    off_block = np.abs(mj[:, None] - mj[None, :]) > 1e-9
    assert np.all(h[off_block] == 0.0)


def test_track_labels_are_bijection(track18, basis18):
    assert len(set(track18.labels)) == basis18.dim
    # uncoupled labels carry the same (l, m_j) content as the basis
    count_l = {}
    for lab in track18.labels:
        count_l[lab.l] = count_l.get(lab.l, 0) + 1
    assert count_l == {0: 2, 1: 6, 2: 10}


def test_track_energies_match_direct_diagonalization(track18, basis18):
    for b in (0.5, 2.0):
        evals, _ = basis18.eigensystem(FieldPoint(b, 0.0))
        k = track18.b_index(b)
        assert np.allclose(
            np.sort(track18.energies[:, k]), np.sort(evals), rtol=0, atol=1e-14
        )


def test_track_overlaps_continuous(track18):
    assert np.all(track18.overlaps >= 0.9)
    assert np.allclose(track18.overlaps[:, 0], 1.0)


def test_track_accessors_consistent(track18):
    lab = track18.labels[0]
    v = track18.vector(lab, 1.0)
    assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)
    assert track18.energy(lab, 1.0) == track18.energies[0, track18.b_index(1.0)]
    with pytest.raises(KeyError):
        track18.b_index(0.77)
    with pytest.raises(KeyError):
        track18.track_index(PaschenBackLabel(99, 0, 0, 0.5))


def test_anchor_b_keeps_label_set(basis18):
    anchored = sweep_and_track(basis18, [0.5, 1.0, 1.5, 2.0], anchor_b=0.5)
    default = sweep_and_track(basis18, [0.5, 1.0, 1.5, 2.0])
    assert set(anchored.labels) == set(default.labels)


def test_dipole_element_symmetric(track18):
    n = track18.basis.n
    s = PaschenBackLabel(n, 0, 0, -0.5)
    p = PaschenBackLabel(n, 1, 0, -0.5)
    d_ab = dipole_element(track18, s, p, 2.0)
    d_ba = dipole_element(track18, p, s, 2.0)
    assert d_ab == pytest.approx(d_ba, rel=1e-12)
    # S-P dipole of a Rydberg state scales like n^2; order 1000 a0 at n=30
    assert 100.0 < abs(d_ab) < 2000.0


def test_export_spectrum_shape(track18):
    buf = io.StringIO()
    export_spectrum(track18, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "B_tesla,block_mj,track_label,energy_GHz,overlap_prev"
    assert len(lines) == 1 + track18.basis.dim * len(track18.b_values)


def test_landau_threshold_scaling():
    # onset field scales as n^(-7/2)
    r = landau_threshold_field(40) / landau_threshold_field(80)
    assert r == pytest.approx(2.0**3.5, rel=1e-12)
    assert landau_threshold_field(45) == pytest.approx(3.37, rel=0.02)


def test_landau_threshold_inverse():
    for n in (30, 45, 60):
        b = landau_threshold_field(n)
        assert landau_threshold_n(b) in (n, n + 1)
    assert landau_threshold_n(2.0) == 53


def test_ionization_round_trip():
    for n in (40, 50, 80):
        assert ionization_n(ionization_gradient(n)) == n
    assert ionization_gradient(50) == pytest.approx(9.21e10, rel=0.01)
    assert ionization_n(1e7) == 228


def test_quadrupole_dominance_gradient():
    assert quadrupole_dominance_gradient(1.0) == pytest.approx(2.2e10, rel=0.01)
    # quadratic in B
    assert quadrupole_dominance_gradient(2.0) == pytest.approx(
        4.0 * quadrupole_dominance_gradient(1.0), rel=1e-12
    )


def test_limit_argument_validation():
    with pytest.raises(ValueError):
        landau_threshold_field(0)
    with pytest.raises(ValueError):
        landau_threshold_n(0.0)
    with pytest.raises(ValueError):
        ionization_n(-1.0)
