"""Coulomb-crystal equilibria, vibrational normal modes, spin-phonon couplings.

N ions of mass M and charge e in a harmonic pseudopotential crystallize
where trap confinement balances Coulomb repulsion.  This module finds
the equilibrium configuration, expands the external potential to second
order to obtain the normal modes of vibration, and differentiates a
dipole-dipole pair interaction along the mode coordinates to get the
linear spin-phonon coupling coefficients.

Coordinate ordering is (X_1..X_N, Y_1..Y_N[, Z_1..Z_N]) throughout, and
for an isotropic planar crystal the converged solution is rotated so
that ion 1 sits on the +x axis with the remaining ions ordered
counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONST
from .trap import TrapFrequencies


class EquilibriumError(RuntimeError):
    """Raised when the equilibrium search fails; carries the last iterate."""

    def __init__(self, message: str, last_positions: np.ndarray | None = None):
        super().__init__(message)
        self.last_positions = last_positions


class SaddleError(RuntimeError):
    """Raised when a mode analysis is requested at an indefinite Hessian."""


@dataclass(frozen=True)
class CrystalConfig:
    """Ion count, confinement and dimensionality policy for one crystal.

    ``planar=True`` restricts the ions to the z = 0 plane (strong axial
    confinement); ``omega_x``/``omega_y`` override the isotropic radial
    frequency to model a small anisotropy.
    """

    n_ions: int
    freqs: TrapFrequencies
    mass_kg: float
    planar: bool = True
    omega_x: float | None = None
    omega_y: float | None = None

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError("need at least one ion")
        if self.mass_kg <= 0:
            raise ValueError("mass must be positive")
        if self.freqs.omega_rho <= 0 and self.omega_x is None:
            raise ValueError("radially unstable trap cannot hold a crystal")

    @property
    def w_x(self) -> float:
        return self.omega_x if self.omega_x is not None else self.freqs.omega_rho

    @property
    def w_y(self) -> float:
        return self.omega_y if self.omega_y is not None else self.freqs.omega_rho

    @property
    def isotropic(self) -> bool:
        return self.omega_x is None and self.omega_y is None

    @property
    def dim(self) -> int:
        return 2 if self.planar else 3

    def trap_curvatures(self) -> np.ndarray:
        """Squared trap frequencies per Cartesian axis (length ``dim``)."""
        w2 = [self.w_x**2, self.w_y**2]
        if not self.planar:
            w2.append(self.freqs.omega_z**2)
        return np.asarray(w2)


def triangle_side(mass_kg: float, omega_rho: float) -> float:
    """Side length of the equilateral three-ion crystal,
    (3 e^2 / (4 pi eps0 M omega_rho^2))^(1/3), in metres."""
    return (3.0 * CONST.coulomb / (mass_kg * omega_rho**2)) ** (1.0 / 3.0)


def _coulomb_k() -> float:
    return CONST.coulomb


def _energy(q: np.ndarray, cfg: CrystalConfig) -> float:
    n, d = cfg.n_ions, cfg.dim
    pos = q.reshape(d, n).T
    w2 = cfg.trap_curvatures()
    e_trap = 0.5 * cfg.mass_kg * float(np.sum(w2 * pos**2))
    e_coul = 0.0
    k = _coulomb_k()
    for i in range(n):
        diff = pos[i + 1:] - pos[i]
        e_coul += k * float(np.sum(1.0 / np.linalg.norm(diff, axis=1)))
    return e_trap + e_coul


def _gradient(q: np.ndarray, cfg: CrystalConfig) -> np.ndarray:
    n, d = cfg.n_ions, cfg.dim
    pos = q.reshape(d, n).T
    w2 = cfg.trap_curvatures()
    grad = cfg.mass_kg * w2 * pos
    k = _coulomb_k()
    for i in range(n):
        diff = pos[i] - pos
        dist = np.linalg.norm(diff, axis=1)
        dist[i] = np.inf
        grad[i] -= k * np.sum(diff / dist[:, None] ** 3, axis=0)
    return grad.T.reshape(-1)


def _hessian(q: np.ndarray, cfg: CrystalConfig) -> np.ndarray:
    """Second derivatives of the external potential in (X.., Y..[, Z..])
    ordering; units J/m^2."""
    n, d = cfg.n_ions, cfg.dim
    pos = q.reshape(d, n).T
    w2 = cfg.trap_curvatures()
    k = _coulomb_k()
    hess = np.zeros((d * n, d * n))
    for a in range(d):
        hess[a * n:(a + 1) * n, a * n:(a + 1) * n] += np.eye(n) * cfg.mass_kg * w2[a]
    for i in range(n):
        for j in range(i + 1, n):
            diff = pos[i] - pos[j]
            r = np.linalg.norm(diff)
            # d^2(1/r)/du dv = (3 d_u d_v - r^2 delta_uv)/r^5
            blk = k * (3.0 * np.outer(diff, diff) - r * r * np.eye(d)) / r**5
            for a in range(d):
                for b in range(d):
                    hess[a * n + i, b * n + i] += blk[a, b]
                    hess[a * n + j, b * n + j] += blk[a, b]
                    hess[a * n + i, b * n + j] -= blk[a, b]
                    hess[a * n + j, b * n + i] -= blk[a, b]
    return hess


@dataclass(frozen=True)
class Equilibrium:
    """Converged crystal configuration.

    ``positions`` is (N, 3) in metres (z = 0 for planar crystals);
    ``saddle`` flags any negative Hessian curvature beyond the rigid
    rotation tolerance.
    """

    positions: np.ndarray
    gradient_norm: float
    energy: float
    saddle: bool
    config: CrystalConfig

    @property
    def n_ions(self) -> int:
        return self.config.n_ions

    def separation(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.positions[i] - self.positions[j]))

    def pair_distances(self) -> np.ndarray:
        p = self.positions
        return np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)

    def theta(self, i: int, j: int) -> float:
        """Angle between the i->j interparticle axis and the z axis."""
        dz = self.positions[i, 2] - self.positions[j, 2]
        return math.acos(dz / self.separation(i, j))

    def phi(self, i: int, j: int) -> float:
        """Azimuth of the i->j interparticle axis in the xy plane."""
        dx = self.positions[i, 0] - self.positions[j, 0]
        dy = self.positions[i, 1] - self.positions[j, 1]
        return math.atan2(dy, dx)


def _seed_positions(cfg: CrystalConfig, rng: np.random.Generator, scale: float) -> np.ndarray:
    n, d = cfg.n_ions, cfg.dim
    pos = np.zeros((n, d))
    if n > 1:
        ang = 2.0 * math.pi * np.arange(n) / n
        pos[:, 0] = scale * np.cos(ang)
        pos[:, 1] = scale * np.sin(ang)
    pos += 0.1 * scale * rng.standard_normal((n, d))
    return pos.T.reshape(-1)


def _newton(q: np.ndarray, cfg: CrystalConfig, tol: float, max_iter: int = 400):
    lam = 0.0
    energy = _energy(q, cfg)
    scale = cfg.mass_kg * max(cfg.w_x, cfg.w_y) ** 2
    for _ in range(max_iter):
        grad = _gradient(q, cfg)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < tol:
            return q, gnorm
        hess = _hessian(q, cfg)
        # Levenberg damping keeps the step descending through the flat
        # rotational direction and far-from-quadratic starts
        step = None
        lam = max(lam, 1e-8 * scale)
        for _ in range(60):
            try:
                step = np.linalg.solve(hess + lam * np.eye(len(q)), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = q + step
            e_trial = _energy(trial, cfg)
            if e_trial <= energy + 1e-12 * abs(energy):
                q, energy = trial, e_trial
                lam *= 0.3
                break
            lam *= 10.0
        else:
            break
    grad = _gradient(q, cfg)
    return q, float(np.linalg.norm(grad))


def _orient_planar(pos: np.ndarray) -> np.ndarray:
    """Center, rotate ion 1 onto +x, and sort counterclockwise.  Only
    meaningful for isotropic radial confinement."""
    pos = pos - pos.mean(axis=0)
    radii = np.linalg.norm(pos, axis=1)
    if np.max(radii) < 1e-30:
        return pos
    ref = int(np.argmax(radii))
    ang = math.atan2(pos[ref, 1], pos[ref, 0])
    c, s = math.cos(-ang), math.sin(-ang)
    rot = np.array([[c, -s], [s, c]])
    pos = pos @ rot.T
    order = np.argsort(np.mod(np.arctan2(pos[:, 1], pos[:, 0]) + 1e-12, 2.0 * math.pi))
    return pos[order]


def solve_equilibrium(
    config: CrystalConfig,
    seed: int = 0,
    restarts: int = 6,
) -> Equilibrium:
    """Find the lowest-energy equilibrium configuration.

    Damped Newton iteration on the potential gradient from perturbed
    ring seeds; the best converged minimum over ``restarts`` random
    starts is kept.  Convergence demands a gradient norm below
    1e-10 x M omega_rho^2 R_char.
    """
    n, d = config.n_ions, config.dim
    w_ref = max(config.w_x, config.w_y)
    r_char = (CONST.coulomb / (config.mass_kg * w_ref**2)) ** (1.0 / 3.0)
    tol = 1e-10 * config.mass_kg * w_ref**2 * r_char

    if n == 1:
        pos3 = np.zeros((1, 3))
        return Equilibrium(pos3, 0.0, 0.0, False, config)

    rng = np.random.default_rng(seed)
    best = None
    last_q = None
    for _ in range(max(1, restarts)):
        q0 = _seed_positions(config, rng, 0.7 * r_char * n ** (1.0 / 3.0))
        q, gnorm = _newton(q0, config, tol)
        last_q = q
        if gnorm >= tol:
            continue
        energy = _energy(q, config)
        if best is None or energy < best[1]:
            best = (q, energy, gnorm)
    if best is None:
        raise EquilibriumError(
            f"equilibrium search did not converge in {restarts} restarts",
            last_positions=last_q.reshape(d, n).T if last_q is not None else None,
        )
    q, energy, gnorm = best

    pos = q.reshape(d, n).T
    if config.planar and config.isotropic:
        pos = _orient_planar(pos)
    if config.planar:
        pos3 = np.column_stack([pos, np.zeros(n)])
    else:
        pos3 = pos

    hess = _hessian(pos[:, :d].T.reshape(-1), config)
    evals = np.linalg.eigvalsh(hess)
    curvature_scale = config.mass_kg * w_ref**2
    saddle = bool(evals[0] < -1e-8 * curvature_scale)
    return Equilibrium(pos3, gnorm, energy, saddle, config)


@dataclass(frozen=True)
class PlanarityReport:
    planar: bool
    ratio: float
    critical_ratio: float
    min_out_of_plane_curvature: float   # s^-2, mass-scaled


# axial-to-radial frequency ratio above which three ions settle into a
# plane rather than a 3D structure (global-minimum crossover)
PLANAR_RATIO_N3 = 1.84


def out_of_plane_curvatures(eq: Equilibrium) -> np.ndarray:
    """Eigenvalues (s^-2) of the axial block of the mass-scaled Hessian
    at a planar equilibrium: positive means z = 0 is a local minimum."""
    cfg = eq.config
    n = cfg.n_ions
    k = _coulomb_k()
    wz2 = cfg.freqs.omega_z**2
    hz = np.eye(n) * wz2
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            r3 = eq.separation(i, j) ** 3
            hz[i, i] -= k / (cfg.mass_kg * r3)
            hz[i, j] += k / (cfg.mass_kg * r3)
    return np.linalg.eigvalsh(hz)


def planarity_check(n_ions: int, freqs: TrapFrequencies, mass_kg: float) -> PlanarityReport:
    """Decide whether N ions form a planar (z = 0) crystal.

    For three ions the known crossover ratio omega_z/omega_rho = 1.84 is
    used; for other counts the out-of-plane Hessian of the planar
    equilibrium is tested for positivity (local stability criterion).
    """
    if freqs.omega_rho <= 0:
        return PlanarityReport(False, math.inf, PLANAR_RATIO_N3, -math.inf)
    ratio = freqs.omega_z / freqs.omega_rho
    cfg = CrystalConfig(n_ions=n_ions, freqs=freqs, mass_kg=mass_kg, planar=True)
    if n_ions == 1:
        return PlanarityReport(True, ratio, 0.0, freqs.omega_z**2)
    eq = solve_equilibrium(cfg)
    min_curv = float(out_of_plane_curvatures(eq)[0])
    if n_ions == 3:
        return PlanarityReport(ratio >= PLANAR_RATIO_N3, ratio, PLANAR_RATIO_N3, min_curv)
    return PlanarityReport(min_curv > 0.0, ratio, math.nan, min_curv)


@dataclass(frozen=True)
class ModeDecomposition:
    """Normal modes of small oscillation about an equilibrium.

    ``hessian`` is the mass-scaled K matrix (s^-2) in (X.., Y..[, Z..])
    ordering; ``mode_matrix`` columns are its orthonormal eigenvectors,
    frequencies ascending.  ``lengths`` holds the oscillator lengths
    sqrt(hbar/(2 M omega)), NaN for zero modes.
    """

    hessian: np.ndarray
    mode_matrix: np.ndarray
    frequencies: np.ndarray
    lengths: np.ndarray
    zero_modes: tuple[int, ...]
    labels: tuple[str, ...]
    equilibrium: Equilibrium


def _classify_modes(ratios: np.ndarray) -> tuple[str, ...]:
    names = {0.0: "rotation", 1.0: "center-of-mass", math.sqrt(1.5): "rocking",
             math.sqrt(3.0): "breathing"}
    labels = []
    for r in ratios:
        for ref, name in names.items():
            if abs(r - ref) < 1e-3:
                labels.append(name)
                break
        else:
            labels.append("mode")
    return tuple(labels)


def normal_modes(eq: Equilibrium) -> ModeDecomposition:
    """Diagonalize the mass-scaled Hessian at ``eq``.

    Raises SaddleError for indefinite curvature beyond the rigid-rotation
    tolerance; zero modes (rotation about z under isotropic confinement)
    are kept with frequency 0 and flagged.
    """
    cfg = eq.config
    n, d = cfg.n_ions, cfg.dim
    q = eq.positions[:, :d].T.reshape(-1)
    kmat = _hessian(q, cfg) / cfg.mass_kg
    evals, evecs = np.linalg.eigh(kmat)
    scale = max(cfg.w_x, cfg.w_y) ** 2
    if evals[0] < -1e-8 * scale:
        raise SaddleError(
            f"indefinite Hessian: lowest curvature {evals[0]:.3e} s^-2"
        )
    zero = tuple(int(i) for i in np.flatnonzero(np.abs(evals) < 1e-8 * scale))
    freqs = np.sqrt(np.clip(evals, 0.0, None))
    lengths = np.full_like(freqs, math.nan)
    pos = freqs > 0
    lengths[pos] = np.sqrt(CONST.hbar / (2.0 * cfg.mass_kg * freqs[pos]))
    w_rho = cfg.freqs.omega_rho if cfg.freqs.omega_rho > 0 else max(cfg.w_x, cfg.w_y)
    labels = _classify_modes(freqs / w_rho) if (n == 3 and cfg.planar) else tuple(
        "mode" for _ in freqs
    )
    return ModeDecomposition(kmat, evecs, freqs, lengths, zero, labels, eq)


@dataclass(frozen=True)
class SpinPhononCouplings:
    """Linear coupling coefficients W^alpha_ij (same units as V0).

    ``w[alpha, i, j]`` multiplies (a + a^dagger) of mode alpha on the
    (i, j) pair interaction; zero modes carry no oscillator length and
    are excluded (rows zeroed, indices listed).
    """

    w: np.ndarray
    excluded_modes: tuple[int, ...]
    v0: float


def spin_phonon_couplings(
    v0: float, eq: Equilibrium, modes: ModeDecomposition
) -> SpinPhononCouplings:
    """Differentiate the R^-3 pair interaction along each mode coordinate.

    W^alpha_ij = -3 (V0 / R_ij) l_alpha n_ij . (m_i - m_j), with m the
    per-ion displacement pattern of the mode-matrix column.  Vanishes
    identically for rigid center-of-mass modes.
    """
    cfg = eq.config
    n, d = cfg.n_ions, cfg.dim
    n_modes = modes.mode_matrix.shape[1]
    w = np.zeros((n_modes, n, n))
    excluded = modes.zero_modes
    for alpha in range(n_modes):
        if alpha in excluded:
            continue
        col = modes.mode_matrix[:, alpha]
        disp = col.reshape(d, n).T
        ell = modes.lengths[alpha]
        for i in range(n):
            for j in range(i + 1, n):
                diff = eq.positions[i, :d] - eq.positions[j, :d]
                r = float(np.linalg.norm(diff))
                n_ij = diff / r
                val = -3.0 * (v0 / r) * ell * float(n_ij @ (disp[i] - disp[j]))
                w[alpha, i, j] = val
                w[alpha, j, i] = val
    return SpinPhononCouplings(w, excluded, v0)


def export_positions(eq: Equilibrium, fh) -> None:
    fh.write("ion,x_um,y_um,z_um\n")
    for i, p in enumerate(eq.positions):
        fh.write(f"{i + 1},{p[0] * 1e6:.9g},{p[1] * 1e6:.9g},{p[2] * 1e6:.9g}\n")


def export_modes(modes: ModeDecomposition, fh) -> None:
    w_rho = modes.equilibrium.config.freqs.omega_rho
    fh.write("alpha,freq_over_wr,class_label\n")
    for alpha, (f, lab) in enumerate(zip(modes.frequencies, modes.labels)):
        ratio = f / w_rho if w_rho > 0 else math.nan
        fh.write(f"{alpha},{ratio:.12g},{lab}\n")


def export_couplings(coup: SpinPhononCouplings, fh) -> None:
    fh.write("alpha,i,j,W_over_V0\n")
    n_modes, n, _ = coup.w.shape
    for alpha in range(n_modes):
        if alpha in coup.excluded_modes:
            continue
        for i in range(n):
            for j in range(i + 1, n):
                fh.write(
                    f"{alpha},{i + 1},{j + 1},{coup.w[alpha, i, j] / coup.v0:.6e}\n"
                )
