"""Internal Hamiltonian of a Rydberg ion in crossed B and quadrupole fields.

The electronic Hamiltonian (atomic units, fields along z)

    H = H_free + (B/2)(l_z + g_s s_z) + (B^2/8) r^2 sin^2(theta)
        + beta r^2 (1 - 3 cos^2(theta))

is assembled on a truncated |n, l, j, m_j> basis built around a target
(n S, n P) manifold: the full (n-1) D..H and (n-2) F..H neighborhoods,
126 states for l_max = 5.  All terms conserve m_j, so the matrix is
block diagonal with blocks of dimension <= 12; diagonalization and
adiabatic tracking across a B-grid work block by block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .angular import (
    cos_theta_element,
    ls_coupling_coefficients,
    quadrupole_angular_element,
    sin2_theta_element,
)
from .constants import CONST
from .radial import RadialState, make_grid, radial_integral, solve_bound_state
from .species import SpeciesParams

GHZ_PER_HARTREE = CONST.hartree / CONST.h / 1e9


class TrackingError(RuntimeError):
    """Adiabatic labeling failed; carries the offending B interval."""

    def __init__(self, msg: str, b_interval=None):
        super().__init__(msg)
        self.b_interval = b_interval


@dataclass(frozen=True)
class CoupledLabel:
    """Fine-structure basis label |n, l, j, m_j>."""

    n: int
    l: int
    j: float
    m_j: float

    def __str__(self) -> str:
        return f"{self.n}L{self.l}j{self.j:g}m{self.m_j:+g}"


@dataclass(frozen=True)
class PaschenBackLabel:
    """Large-field label |n, l, m_l, m_s>."""

    n: int
    l: int
    m_l: int
    m_s: float

    def __str__(self) -> str:
        return f"{self.n}L{self.l}ml{self.m_l:+d}ms{self.m_s:+g}"


@dataclass(frozen=True)
class FieldPoint:
    """One trap operating point: B in tesla, gradient beta in V/m^2."""

    b_tesla: float
    beta: float = 0.0

    def __post_init__(self):
        if self.b_tesla < 0:
            raise ValueError(f"B must be >= 0, got {self.b_tesla}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")

    @property
    def b_au(self) -> float:
        return self.b_tesla / CONST.b_atomic

    @property
    def beta_au(self) -> float:
        return self.beta / CONST.gradient_atomic


def _shell_recipe(n: int, l_max: int) -> list[tuple[int, int]]:
    """(n', l) manifolds kept around the (nS, nP) target states."""
    shells = [(n, 0), (n, 1)]
    shells += [(n - 1, l) for l in range(2, l_max + 1)]
    shells += [(n - 2, l) for l in range(3, l_max + 1)]
    return shells


class BasisSet:
    """Truncated fine-structure basis with precomputed field couplings.

    The three field terms factor into (field strength) x (fixed
    coefficient matrix), so assembly at any FieldPoint is a cheap linear
    combination of matrices computed once per basis.
    """

    def __init__(
        self,
        species: SpeciesParams,
        n: int,
        l_max: int = 5,
        dx: float | None = None,
    ):
        if n < l_max + 2:
            raise ValueError(f"n = {n} too small: n - 2 must support l = {l_max}")
        self.species = species
        self.n = n
        self.l_max = l_max
        self.grid = make_grid(species, n, dx=dx)

        # one radial solve per (n', l, j) channel, all on the shared grid
        self.radial: dict[tuple[int, int, float], RadialState] = {}
        for n_sh, l in _shell_recipe(n, l_max):
            for j in ((0.5,) if l == 0 else (l - 0.5, l + 0.5)):
                self.radial[(n_sh, l, j)] = solve_bound_state(
                    species, n_sh, l, j, grid=self.grid
                )

        self.labels: list[CoupledLabel] = []
        for n_sh, l in _shell_recipe(n, l_max):
            for j in ((0.5,) if l == 0 else (l - 0.5, l + 0.5)):
                m_j = -j
                while m_j <= j + 1e-9:
                    self.labels.append(CoupledLabel(n_sh, l, j, m_j))
                    m_j += 1.0
        self.dim = len(self.labels)

        self._build_matrices()

    def _build_matrices(self) -> None:
        dim = self.dim
        labels = self.labels
        keys = list(self.radial)
        kidx = {k: i for i, k in enumerate(keys)}

        # radial integrals between channels, shared grid
        n_ch = len(keys)
        r0 = np.zeros((n_ch, n_ch))
        r1 = np.zeros((n_ch, n_ch))
        r2 = np.zeros((n_ch, n_ch))
        for i, ka in enumerate(keys):
            for k, kb in enumerate(keys):
                if k < i:
                    continue
                sa, sb = self.radial[ka], self.radial[kb]
                r0[i, k] = r0[k, i] = radial_integral(sa, sb, 0)
                r1[i, k] = r1[k, i] = radial_integral(sa, sb, 1)
                r2[i, k] = r2[k, i] = radial_integral(sa, sb, 2)

        self.energies = np.array(
            [self.radial[(s.n, s.l, s.j)].energy for s in labels]
        )
        zee = np.zeros((dim, dim))
        dia = np.zeros((dim, dim))
        quad = np.zeros((dim, dim))
        zmat = np.zeros((dim, dim))

        cg = {
            (s.l, s.j, s.m_j): ls_coupling_coefficients(s.l, s.j, s.m_j)
            for s in labels
        }
        for a, sa in enumerate(labels):
            ia = kidx[(sa.n, sa.l, sa.j)]
            ca = cg[(sa.l, sa.j, sa.m_j)]
            for b, sb in enumerate(labels):
                if b < a or sb.m_j != sa.m_j:
                    continue
                ib = kidx[(sb.n, sb.l, sb.j)]
                cb = cg[(sb.l, sb.j, sb.m_j)]
                ang_sin2 = 0.0
                ang_quad = 0.0
                ang_cos = 0.0
                ang_zee = 0.0
                for s_i, m_s in enumerate((0.5, -0.5)):
                    m_l = sa.m_j - m_s
                    wgt = ca[s_i] * cb[s_i]
                    if wgt == 0.0:
                        continue
                    m_li = round(m_l)
                    ang_sin2 += wgt * sin2_theta_element(sa.l, m_li, sb.l, m_li)
                    ang_quad += wgt * quadrupole_angular_element(sa.l, m_li, sb.l, m_li)
                    ang_cos += wgt * cos_theta_element(sa.l, m_li, sb.l, m_li)
                    if sa.n == sb.n and sa.l == sb.l:
                        ang_zee += wgt * (m_l + CONST.g_s * m_s)
                zee[a, b] = zee[b, a] = 0.5 * ang_zee * r0[ia, ib]
                dia[a, b] = dia[b, a] = ang_sin2 * r2[ia, ib]
                quad[a, b] = quad[b, a] = ang_quad * r2[ia, ib]
                zmat[a, b] = zmat[b, a] = ang_cos * r1[ia, ib]

        self._zeeman = zee          # coefficient of B (a.u.)
        self._diamagnetic = dia     # coefficient of B^2/8 (a.u.)
        self._quadrupole = quad     # coefficient of beta (a.u.)
        self._z_dipole = zmat       # <a| r cos(theta) |b> (Bohr)

        mjs = sorted({s.m_j for s in labels})
        self.block_indices = {
            mj: np.array([i for i, s in enumerate(labels) if s.m_j == mj])
            for mj in mjs
        }

    # field-term matrices in Hartree
    def zeeman_matrix(self, b_tesla: float) -> np.ndarray:
        return (b_tesla / CONST.b_atomic) * self._zeeman

    def diamagnetic_matrix(self, b_tesla: float) -> np.ndarray:
        return ((b_tesla / CONST.b_atomic) ** 2 / 8.0) * self._diamagnetic

    def quadrupole_matrix(self, beta: float) -> np.ndarray:
        return (beta / CONST.gradient_atomic) * self._quadrupole

    def z_dipole_matrix(self) -> np.ndarray:
        """<a| z |b> over the basis, in Bohr radii."""
        return self._z_dipole

    def assemble(self, point: FieldPoint) -> np.ndarray:
        """Hermitian Hamiltonian matrix (Hartree) at one field point."""
        h = np.diag(self.energies).astype(float)
        h += self.zeeman_matrix(point.b_tesla)
        h += self.diamagnetic_matrix(point.b_tesla)
        h += self.quadrupole_matrix(point.beta)
        return h

    def eigensystem(self, point: FieldPoint) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending within each m_j block, concatenated in
        basis-index order) and eigenvectors as columns, computed block
        by block."""
        h = self.assemble(point)
        evals = np.zeros(self.dim)
        evecs = np.zeros((self.dim, self.dim))
        for idx in self.block_indices.values():
            w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
            evals[idx] = w
            evecs[np.ix_(idx, idx)] = v
        return evals, evecs

    def uncoupled_transform(self) -> tuple[list[PaschenBackLabel], np.ndarray]:
        """Paschen-Back labels and the matrix U with U[u, c] =
        <n,l,m_l,m_s | n,l,j,m_j> mapping coupled coordinates to
        uncoupled ones."""
        unc: list[PaschenBackLabel] = []
        index: dict[PaschenBackLabel, int] = {}
        u = np.zeros((self.dim, self.dim))
        for c, s in enumerate(self.labels):
            coeffs = ls_coupling_coefficients(s.l, s.j, s.m_j)
            for coeff, m_s in zip(coeffs, (0.5, -0.5)):
                m_l = round(s.m_j - m_s)
                if abs(m_l) > s.l or coeff == 0.0:
                    continue
                lab = PaschenBackLabel(s.n, s.l, m_l, m_s)
                if lab not in index:
                    index[lab] = len(unc)
                    unc.append(lab)
                u[index[lab], c] = coeff
        return unc, u


@dataclass
class AdiabaticTrack:
    """Eigen-decomposition across an ascending B-grid with continuous
    track labels assigned by maximal overlap between consecutive steps."""

    b_values: np.ndarray                    # ascending, tesla
    beta: float
    energies: np.ndarray                    # (dim, n_b), Hartree, per track
    vectors: np.ndarray                     # (n_b, dim, dim), columns = tracks
    labels: list[PaschenBackLabel]          # per track, from the largest-B point
    overlaps: np.ndarray                    # (dim, n_b), step overlap; col 0 = 1
    block_mj: np.ndarray                    # (dim,), m_j of each track
    basis: BasisSet

    def track_index(self, label: PaschenBackLabel) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label} not tracked") from None

    def b_index(self, b_tesla: float) -> int:
        i = int(np.argmin(np.abs(self.b_values - b_tesla)))
        if abs(self.b_values[i] - b_tesla) > 1e-9 * max(1.0, abs(b_tesla)):
            raise KeyError(f"B = {b_tesla} T is not a grid point of this sweep")
        return i

    def energy(self, label: PaschenBackLabel, b_tesla: float) -> float:
        return float(self.energies[self.track_index(label), self.b_index(b_tesla)])

    def vector(self, label: PaschenBackLabel, b_tesla: float) -> np.ndarray:
        return self.vectors[self.b_index(b_tesla)][:, self.track_index(label)]


def _match_step(v_prev: np.ndarray, v_next: np.ndarray, blocks) -> tuple[np.ndarray, np.ndarray]:
    """Permutation aligning the columns of v_next to those of v_prev by
    maximal absolute overlap, block by block; returns (perm, overlap)."""
    dim = v_prev.shape[1]
    perm = np.zeros(dim, dtype=int)
    ov = np.zeros(dim)
    for idx in blocks.values():
        m = np.abs(v_prev[np.ix_(idx, idx)].T @ v_next[np.ix_(idx, idx)])
        rows, cols = linear_sum_assignment(-m)
        for r, c in zip(rows, cols):
            perm[idx[r]] = idx[c]
            ov[idx[r]] = m[r, c]
    return perm, ov


def sweep_and_track(
    basis: BasisSet,
    b_values,
    beta: float = 0.0,
    min_overlap: float = 0.9,
    max_refine: int = 12,
    anchor_b: float | None = None,
) -> AdiabaticTrack:
    """Diagonalize across a B-grid and follow each eigenstate continuously.

    When the best column overlap between consecutive grid points drops
    below ``min_overlap``, a midpoint is inserted (up to ``max_refine``
    bisections per interval) so that tracks never jump branches.  Track
    labels are the dominant Paschen-Back components at ``anchor_b``
    (default: the largest B) and must form a bijection onto the basis;
    anchoring below the l-mixing onset keeps the labels meaningful when
    the sweep continues into the strongly mixed regime.
    """
    b_list = sorted(float(b) for b in b_values)
    if not b_list:
        raise ValueError("empty B grid")
    solved: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def eig(b: float):
        if b not in solved:
            solved[b] = basis.eigensystem(FieldPoint(b, beta))
        return solved[b]

    # refine intervals until consecutive overlaps are acceptable
    bs = list(b_list)
    k = 0
    while k < len(bs) - 1:
        _, v0 = eig(bs[k])
        _, v1 = eig(bs[k + 1])
        _, ov = _match_step(v0, v1, basis.block_indices)
        if ov.min() >= min_overlap or (bs[k + 1] - bs[k]) <= 0:
            k += 1
            continue
        depth = 0
        while ov.min() < min_overlap and depth < max_refine:
            mid = 0.5 * (bs[k] + bs[k + 1])
            bs.insert(k + 1, mid)
            _, vm = eig(mid)
            _, ov = _match_step(v0, vm, basis.block_indices)
            depth += 1
        if ov.min() < min_overlap:
            raise TrackingError(
                f"overlap {ov.min():.3f} < {min_overlap} after {max_refine} "
                f"bisections",
                b_interval=(bs[k], bs[k + 1]),
            )

    n_b = len(bs)
    dim = basis.dim
    energies = np.zeros((dim, n_b))
    vectors = np.zeros((n_b, dim, dim))
    overlaps = np.ones((dim, n_b))
    w, v = eig(bs[0])
    energies[:, 0] = w
    vectors[0] = v
    for k in range(1, n_b):
        w_next, v_next = eig(bs[k])
        perm, ov = _match_step(vectors[k - 1], v_next, basis.block_indices)
        if ov.min() < 0.5:
            raise TrackingError(
                f"consecutive overlap {ov.min():.3f} < 0.5 at "
                f"B = {bs[k - 1]}..{bs[k]} T",
                b_interval=(bs[k - 1], bs[k]),
            )
        energies[:, k] = w_next[perm]
        vectors[k] = v_next[:, perm]
        # fix continuous sign gauge
        signs = np.sign(np.einsum("ij,ij->j", vectors[k - 1], vectors[k]))
        signs[signs == 0] = 1.0
        vectors[k] *= signs
        overlaps[:, k] = ov

    # label tracks by their Paschen-Back character at the anchor point:
    # optimal assignment on the amplitude matrix, which reduces to the
    # dominant component whenever the dominant components are distinct
    if anchor_b is None:
        anchor = n_b - 1
    else:
        anchor = int(np.argmin(np.abs(np.asarray(bs) - anchor_b)))
    unc_labels, u = basis.uncoupled_transform()
    weight = np.abs(u @ vectors[anchor])
    rows, cols = linear_sum_assignment(-weight)
    assignment = dict(zip(cols, rows))
    labels: list[PaschenBackLabel] = []
    for t in range(dim):
        r = assignment[t]
        if weight[r, t] < 0.25:
            raise TrackingError(
                f"ambiguous Paschen-Back label for track {t} at "
                f"B = {bs[anchor]} T (amplitude {weight[r, t]:.3f})",
                b_interval=(bs[max(anchor - 1, 0)], bs[anchor]),
            )
        labels.append(unc_labels[r])
    block_mj = np.array([s.m_j for s in basis.labels])
    return AdiabaticTrack(
        b_values=np.array(bs),
        beta=beta,
        energies=energies,
        vectors=vectors,
        labels=labels,
        overlaps=overlaps,
        block_mj=block_mj,
        basis=basis,
    )


def dipole_element(
    track: AdiabaticTrack,
    label_a: PaschenBackLabel,
    label_b: PaschenBackLabel,
    b_tesla: float,
) -> float:
    """<E_a(B)| z |E_b(B)> in Bohr radii (z = r cos(theta))."""
    va = track.vector(label_a, b_tesla)
    vb = track.vector(label_b, b_tesla)
    return float(va @ track.basis.z_dipole_matrix() @ vb)


def export_spectrum(track: AdiabaticTrack, fh) -> None:
    """Write sweep rows `B_tesla, block_mj, track_label, energy_GHz,
    overlap_prev` to an open text file."""
    fh.write("B_tesla,block_mj,track_label,energy_GHz,overlap_prev\n")
    for t, lab in enumerate(track.labels):
        for k, b in enumerate(track.b_values):
            fh.write(
                f"{b:.9g},{track.block_mj[t]:g},{lab},"
                f"{track.energies[t, k] * GHZ_PER_HARTREE:.12g},"
                f"{track.overlaps[t, k]:.6f}\n"
            )


# field-limit estimates


def landau_threshold_field(n: int) -> float:
    """B (tesla) above which the diamagnetic term exceeds the n -> n+1
    level spacing, reorganizing states into Landau-like levels."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return CONST.b_atomic * math.sqrt(384.0 / (5.0 * n**7))


def landau_threshold_n(b_tesla: float) -> int:
    """Smallest principal quantum number with diamagnetic dominance at B."""
    if b_tesla <= 0:
        raise ValueError(f"B must be > 0, got {b_tesla}")
    n_star = (384.0 / (5.0 * (b_tesla / CONST.b_atomic) ** 2)) ** (1.0 / 7.0)
    return max(1, math.ceil(n_star))


def ionization_gradient(n: int) -> float:
    """Gradient beta_ion (V/m^2) at which the quadrupole saddle depth
    reaches the binding energy 2 E_h / n^2."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    e_bind = 2.0 * CONST.hartree / n**2
    return math.pi**2 * CONST.eps0**2 / CONST.e**5 * (2.0 * e_bind / 3.0) ** 3


def ionization_n(beta: float) -> int:
    """Largest n still bound at gradient beta (inverse of
    ionization_gradient)."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    depth = 1.5 * (CONST.e**5 * beta / (math.pi**2 * CONST.eps0**2)) ** (1.0 / 3.0)
    # nudge past rounding so the exact threshold gradient maps back to n
    return int(math.sqrt(2.0 * CONST.hartree / depth) * (1.0 + 1e-12))


def quadrupole_dominance_gradient(b_tesla: float) -> float:
    """Gradient beta_max (V/m^2) where the quadrupole energy shift matches
    the diamagnetic one: e beta = e^2 B^2 / (8 m_e)."""
    if b_tesla < 0:
        raise ValueError(f"B must be >= 0, got {b_tesla}")
    return CONST.e * b_tesla**2 / (8.0 * CONST.m_e)
