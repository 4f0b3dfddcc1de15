"""Facilitated transverse-field Ising model on a small ion crystal.

H = Omega sum_i sigma^x_i - Delta sum_i P_i + sum_{i<j} V_ij P_i P_j,

with P the projector on the excited (up) state.  Exact dense
diagonalization up to 12 sites, symmetry-adapted states for the
triangular three-ion case, and the first-order perturbative splitting
of the frustrated sixfold ground manifold.

Facilitation here means the pair interaction exactly compensates the
single-excitation energy gain, V = +Delta in the sign convention of the
Hamiltonian above: the Omega = 0 spectrum then collapses to the two
values {0, -Delta}, with the sixfold -Delta manifold containing every
one- and two-excitation product state.  (Conventions that attach the
minus sign to the detuning term instead state the same condition as
V = -Delta.)

Basis ordering: index b in [0, 2^N) encodes site i (1-based leftmost)
in bit N - i, bit value 1 meaning the up/excited state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

MAX_SITES = 12


@dataclass(frozen=True)
class SpinModelParams:
    """Site count, drives, and the symmetric pair-coupling matrix."""

    n_sites: int
    omega: float
    delta: float
    couplings: np.ndarray

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("need at least one site")
        if self.n_sites > MAX_SITES:
            raise ValueError(
                f"exact diagonalization capped at {MAX_SITES} sites, got {self.n_sites}"
            )
        v = np.asarray(self.couplings, dtype=float)
        if v.shape != (self.n_sites, self.n_sites):
            raise ValueError("couplings must be an N x N matrix")
        if not np.allclose(v, v.T, atol=1e-14):
            raise ValueError("couplings must be symmetric")
        if np.any(np.abs(np.diag(v)) > 0):
            raise ValueError("couplings must have zero diagonal")
        object.__setattr__(self, "couplings", v)

    @classmethod
    def uniform(cls, n_sites: int, omega: float, delta: float, v0: float) -> "SpinModelParams":
        v = np.full((n_sites, n_sites), v0, dtype=float)
        np.fill_diagonal(v, 0.0)
        return cls(n_sites, omega, delta, v)

    @classmethod
    def facilitation(cls, n_sites: int, omega: float, delta: float) -> "SpinModelParams":
        """Uniform couplings tuned so pair energy compensates the
        excitation energy (V = +Delta here; see module docstring)."""
        return cls.uniform(n_sites, omega, delta, v0=delta)

    @classmethod
    def from_distances(
        cls, omega: float, delta: float, v_ref: float, r_ref: float, distances: np.ndarray
    ) -> "SpinModelParams":
        """Geometry-derived couplings V_ij = v_ref (r_ref / R_ij)^3."""
        r = np.asarray(distances, dtype=float)
        n = r.shape[0]
        v = np.zeros_like(r)
        off = ~np.eye(n, dtype=bool)
        v[off] = v_ref * (r_ref / r[off]) ** 3
        return cls(n, omega, delta, v)


def build_hamiltonian(params: SpinModelParams) -> np.ndarray:
    """Dense real-symmetric matrix of the model over the product basis."""
    n = params.n_sites
    dim = 1 << n
    h = np.zeros((dim, dim))
    for b in range(dim):
        occ = [(b >> (n - 1 - i)) & 1 for i in range(n)]
        diag = -params.delta * sum(occ)
        for i, j in combinations(range(n), 2):
            diag += params.couplings[i, j] * occ[i] * occ[j]
        h[b, b] = diag
        for i in range(n):
            h[b, b ^ (1 << (n - 1 - i))] += params.omega
    return h


@dataclass(frozen=True)
class SpinSpectrum:
    """Eigenvalues (ascending) and eigenvectors (columns) of one model."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    params: SpinModelParams

    def degenerate_groups(self, rtol: float = 1e-9) -> list[list[int]]:
        """Indices of eigenvalues grouped within rtol x max|E|."""
        tol = rtol * max(1.0, float(np.max(np.abs(self.eigenvalues))))
        groups: list[list[int]] = [[0]]
        for i in range(1, len(self.eigenvalues)):
            if self.eigenvalues[i] - self.eigenvalues[groups[-1][0]] < tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups


def diagonalize(params: SpinModelParams) -> SpinSpectrum:
    evals, evecs = np.linalg.eigh(build_hamiltonian(params))
    return SpinSpectrum(evals, evecs, params)


def _product_state(n: int, up_sites: tuple[int, ...]) -> np.ndarray:
    b = 0
    for i in up_sites:
        b |= 1 << (n - 1 - i)
    v = np.zeros(1 << n)
    v[b] = 1.0
    return v


def symmetry_states() -> dict[str, np.ndarray]:
    """Symmetry-adapted one- and two-excitation states of the triangle.

    Returns S1, S2 (translationally symmetric), C(r)_(1|2) for r = +-1
    (cyclic phases exp(2 pi i r k / 3)), and the combinations
    S(+|-) = (S1 +- S2)/sqrt2 and C(r)_(+|-) likewise.
    """
    n = 3
    singles = [_product_state(n, (i,)) for i in range(3)]
    doubles = [
        _product_state(n, (0, 1)),
        _product_state(n, (0, 2)),
        _product_state(n, (1, 2)),
    ]
    out: dict[str, np.ndarray] = {}
    out["S1"] = sum(singles) / math.sqrt(3)
    out["S2"] = sum(doubles) / math.sqrt(3)
    for r in (1, -1):
        w = cmath.exp(2j * math.pi * r / 3)
        out[f"C{r:+d}_1"] = (singles[0] + w * singles[1] + w**2 * singles[2]) / math.sqrt(3)
        out[f"C{r:+d}_2"] = (doubles[0] + w * doubles[1] + w**2 * doubles[2]) / math.sqrt(3)
    for base in ("S", "C+1", "C-1"):
        a, b = out[f"{base}1" if base == "S" else f"{base}_1"], (
            out[f"{base}2" if base == "S" else f"{base}_2"]
        )
        out[f"{base}+"] = (a + b) / math.sqrt(2)
        out[f"{base}-"] = (a - b) / math.sqrt(2)
    return out


@dataclass(frozen=True)
class PerturbativeLevel:
    energy: float
    label: str
    multiplicity: int
    states: tuple[np.ndarray, ...]


def perturbative_energies(omega: float, delta: float) -> list[PerturbativeLevel]:
    """First-order splitting of the sixfold facilitation manifold.

    Diagonalizes the drive term inside the degenerate subspace spanned
    by the six one- and two-excitation states; the symmetric pair splits
    by +-2 Omega and the cyclic quadruplet by +-Omega (twice each),
    giving levels -Delta - 2|Omega| ... -Delta + 2|Omega|.
    """
    sym = symmetry_states()
    basis = [sym["S1"], sym["S2"], sym["C+1_1"], sym["C+1_2"], sym["C-1_1"], sym["C-1_2"]]
    params = SpinModelParams.facilitation(3, omega, delta)
    h = build_hamiltonian(params).astype(complex)
    h0 = build_hamiltonian(SpinModelParams.facilitation(3, 0.0, delta))
    dh = h - h0
    block = np.array([[np.vdot(a, dh @ b) for b in basis] for a in basis])
    evals, evecs = np.linalg.eigh(block)
    levels: list[PerturbativeLevel] = []
    i = 0
    while i < len(evals):
        j = i
        while j + 1 < len(evals) and abs(evals[j + 1] - evals[i]) < 1e-12 * max(
            1.0, abs(delta), abs(omega)
        ):
            j += 1
        states = tuple(
            sum(evecs[k, m] * basis[k] for k in range(6)) for m in range(i, j + 1)
        )
        shift = evals[i]
        if abs(abs(shift) - 2.0 * abs(omega)) < 1e-9 * max(1.0, abs(omega)):
            label = "S-" if shift < 0 else "S+"
        elif abs(shift) < 1e-12 * max(1.0, abs(omega)):
            label = "S/C"
        else:
            label = "C-" if shift < 0 else "C+"
        levels.append(
            PerturbativeLevel(-delta + float(shift), label, j - i + 1, states)
        )
        i = j + 1
    return levels


@dataclass(frozen=True)
class GroundStateReport:
    energy: float
    degeneracy: int
    overlap_symmetric: float
    entanglement_entropy: float


def _single_site_entropy(state: np.ndarray, n: int) -> float:
    """Von Neumann entropy of site 1's reduced density matrix."""
    psi = state.reshape(2, 1 << (n - 1))
    rho = psi @ psi.conj().T
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-15]
    return float(-np.sum(evals * np.log(evals)))


def ground_state_report(params: SpinModelParams, rtol: float = 1e-9) -> GroundStateReport:
    """Ground energy, degeneracy, overlap with the symmetric manifold
    combinations S_+- and the single-site entanglement entropy.

    For a degenerate ground space the overlap is computed against the
    projector onto that space; the reported state phase is fixed by a
    positive overlap with S1.
    """
    spec = diagonalize(params)
    group = spec.degenerate_groups(rtol)[0]
    space = spec.eigenvectors[:, group]
    energy = float(spec.eigenvalues[group[0]])
    if params.n_sites == 3:
        sym = symmetry_states()
        overlap = max(
            float(np.linalg.norm(space.conj().T @ sym[name]) ** 2)
            for name in ("S+", "S-")
        )
        psi = space[:, 0].copy()
        s1_ov = float(sym["S1"].real @ psi)
        if s1_ov < 0:
            psi = -psi
    else:
        overlap = math.nan
        psi = space[:, 0]
    entropy = _single_site_entropy(psi, params.n_sites)
    return GroundStateReport(energy, len(group), overlap, entropy)


def export_spectrum_sweep(
    omegas, delta: float, fh, n_sites: int = 3, v0: float | None = None
) -> None:
    """Exact spectrum along an Omega sweep as rows
    `Omega_over_Delta, level_index, energy_over_Delta, symmetry_label`.
    ``v0=None`` selects the facilitation coupling; symmetry labels are
    attached only in that case."""
    facilitated = v0 is None
    fh.write("Omega_over_Delta,level_index,energy_over_Delta,symmetry_label\n")
    for om in omegas:
        if facilitated:
            params = SpinModelParams.facilitation(n_sites, float(om), delta)
        else:
            params = SpinModelParams.uniform(n_sites, float(om), delta, v0)
        spec = diagonalize(params)
        labels = [""] * len(spec.eigenvalues)
        if n_sites == 3 and facilitated:
            for lv in perturbative_energies(float(om), delta):
                # nearest exact levels inherit the perturbative label
                for s in lv.states:
                    ix = int(np.argmax(np.abs(spec.eigenvectors.T.conj() @ s)))
                    labels[ix] = lv.label
        for k, e in enumerate(spec.eigenvalues):
            fh.write(f"{om / delta:.9g},{k},{e / delta:.12g},{labels[k]}\n")
