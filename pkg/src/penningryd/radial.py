"""Bound states of the valence electron in an l-dependent model potential.

The reduced radial equation u'' = [l(l+1)/r^2 + 2V(r) - 2E] u (Hartree
atomic units, core charge +2e) is integrated on a square-root-scaled
grid: with r = x^2 and w(x) = u(r)/sqrt(x) it becomes

    w''(x) = g(x) w(x),
    g(x) = (2l + 1/2)(2l + 3/2)/x^2 + 8 x^2 [V(x^2) - E],

which is uniform-step friendly for both the fast core oscillations and
the slowly varying n^2 a0 tail.  Eigenvalues are located by node-count
bisection followed by root finding on the two-sided Numerov matching
residual at the outer classical turning point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._numerov import two_sided
from .constants import CONST
from .species import SpeciesParams

DEFAULT_DX = 0.005          # step in x = sqrt(r); satisfies the sampling rule below
POINTS_PER_WAVELENGTH = 40  # minimum sampling of the local de Broglie wavelength


class GridError(ValueError):
    """Raised for incompatible or unusable radial grids."""


class ConvergenceError(RuntimeError):
    """Eigenvalue search failed; carries bracket diagnostics."""

    def __init__(self, msg: str, bracket=None, node_counts=None):
        super().__init__(msg)
        self.bracket = bracket
        self.node_counts = node_counts


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid in x = sqrt(r); node positions r = x^2 (Bohr radii)."""

    x: np.ndarray
    dx: float

    @property
    def r(self) -> np.ndarray:
        return self.x**2

    @property
    def r_min(self) -> float:
        return float(self.x[0] ** 2)

    @property
    def r_max(self) -> float:
        return float(self.x[-1] ** 2)

    @property
    def n_points(self) -> int:
        return self.x.shape[0]


def inner_cutoff(species: SpeciesParams) -> float:
    """Inner grid radius (Bohr).

    Screened species get a hard wall at 0.05 Bohr.  Inside that radius
    the model potential is not trusted, but it must still extend deep
    enough that the screened Coulomb term (-Z_nuc/r as r -> 0) carries
    the full set of inner radial nodes; a wall at the polarization core
    radius itself would swallow nodes and break the n - l - 1 node law.
    The pure Coulomb reference has no core; its integration starts from
    the exact power series of u(r), evaluated far enough out that the
    steep 1/x^2 term of the scaled equation is well resolved by the step.
    """
    if species.is_coulombic:
        return 0.09
    return 0.05


def make_grid(species: SpeciesParams, n_max: int, dx: float | None = None) -> RadialGrid:
    """Grid reaching r_max = 2 n_max (n_max + 15) Bohr.

    The default step satisfies >= POINTS_PER_WAVELENGTH points per local
    de Broglie wavelength: on the x-grid the local wavenumber is
    sqrt(-g) <~ 5 for singly charged Rydberg ions, so 2*pi/(40*5) ~ 0.03
    is the rule's bound and DEFAULT_DX sits well inside it (the tighter
    value is set by eigenvalue accuracy, not by sampling).
    """
    if n_max < 1:
        raise GridError(f"n_max must be >= 1, got {n_max}")
    if dx is None:
        dx = DEFAULT_DX
    if dx <= 0:
        raise GridError(f"dx must be positive, got {dx}")
    x_min = math.sqrt(inner_cutoff(species))
    x_max = math.sqrt(2.0 * n_max * (n_max + 15.0))
    n_pts = int(math.ceil((x_max - x_min) / dx)) + 1
    x = x_min + dx * np.arange(n_pts)
    return RadialGrid(x=x, dx=dx)


def _ls_expectation(l: int, j: float) -> float:
    return 0.5 * (j * (j + 1.0) - l * (l + 1.0) - 0.75)


def model_potential(
    species: SpeciesParams,
    l: int,
    j: float,
    r: np.ndarray,
    include_spin_orbit: bool | None = None,
) -> np.ndarray:
    """Central potential V(r) in Hartree for one (l, j) channel.

    Sum of the screened Coulomb term of a +2e core, the induced core
    polarization term, and the relativistic spin-orbit term.  Spin-orbit
    is omitted for l = 0 and for the pure Coulomb reference species
    (whose role is to reproduce the exact non-relativistic spectrum).
    """
    ch = species.channel(l)
    a = float(species.z_nuc - 2)
    e1 = np.exp(-ch.alpha1 * r)
    e3 = np.exp(-ch.alpha3 * r)
    screened = 2.0 + a * e1 + ch.alpha2 * e3
    v_c = -screened / r

    s6 = (r / ch.r_c) ** 6
    cut = -np.expm1(-s6)  # 1 - exp(-s6), accurate for small s6
    v_p = -0.5 * species.alpha_cp / r**4 * cut

    v = v_c + v_p

    if include_spin_orbit is None:
        include_spin_orbit = l > 0 and not species.is_coulombic
    if include_spin_orbit and l > 0:
        dv_c = screened / r**2 + (a * ch.alpha1 * e1 + ch.alpha2 * ch.alpha3 * e3) / r
        dv_p = 2.0 * species.alpha_cp / r**5 * cut - 3.0 * species.alpha_cp * s6 / r**5 * np.exp(-s6)
        dv = dv_c + dv_p
        c2 = 1.0 / CONST.alpha_fs**2  # m c^2 in Hartree (m = 1)
        v_so = _ls_expectation(l, j) / (2.0 * c2 * r) * (1.0 - v / (2.0 * c2)) ** -2 * dv
        v = v + v_so
    return v


@dataclass(frozen=True)
class RadialState:
    """One converged bound state sampled on its grid."""

    n: int
    l: int
    j: float
    energy: float               # Hartree, negative
    grid: RadialGrid
    u: np.ndarray               # reduced wavefunction u(r) = r R(r), normalized
    nodes: int

    @property
    def effective_n(self) -> float:
        return math.sqrt(-2.0 / self.energy)

    @property
    def quantum_defect(self) -> float:
        return self.n - self.effective_n


def _series_start(l: int, energy: float, x0: float, x1: float) -> tuple[float, float]:
    """w at the first two grid points from the power series of u(r) for a
    pure -2/r potential: u = sum_k a_k r^(l+1+k)."""
    vals = []
    for x in (x0, x1):
        r = x * x
        a_prev2 = 0.0
        a_prev1 = 1.0
        total = 1.0
        rk = 1.0
        for k in range(1, 60):
            a_k = (-4.0 * a_prev1 - 2.0 * energy * a_prev2) / (k * (2 * l + 1 + k))
            rk *= r
            term = a_k * rk
            total += term
            if abs(term) < 1e-18 * abs(total):
                break
            a_prev2, a_prev1 = a_prev1, a_k
        u = r ** (l + 1) * total
        vals.append(u / math.sqrt(x))
    return vals[0], vals[1]


def solve_bound_state(
    species: SpeciesParams,
    n: int,
    l: int,
    j: float,
    grid: RadialGrid | None = None,
    dx: float | None = None,
) -> RadialState:
    """Find the bound state |n, l, j> by two-sided Numerov shooting.

    Raises ConvergenceError (with the bracket and node counts tried)
    when no matching-residual sign change exists in the search window.
    """
    if n < 1 or l < 0 or l >= n:
        raise ValueError(f"invalid quantum numbers n={n}, l={l}")
    if abs(abs(j - l) - 0.5) > 1e-12:
        raise ValueError(f"j must be l +/- 1/2, got l={l}, j={j}")
    if grid is None:
        grid = make_grid(species, n, dx=dx)
    x = grid.x
    r = grid.r
    h = grid.dx
    v = model_potential(species, l, j, r)
    base = (2 * l + 0.5) * (2 * l + 1.5) / x**2 + 8.0 * x**2 * v
    x2 = x**2
    n_pts = x.shape[0]
    target = n - l - 1
    coulombic = species.is_coulombic

    def shoot(energy: float, m_fixed: int | None = None):
        g = base - 8.0 * energy * x2
        if m_fixed is None:
            allowed = np.nonzero(g < 0.0)[0]
            if allowed.size == 0:
                return None, 0, math.inf
            m = int(min(max(allowed[-1], 2), n_pts - 3))
        else:
            m = m_fixed
        if coulombic:
            w0, w1 = _series_start(l, energy, float(x[0]), float(x[1]))
        else:
            w0, w1 = 0.0, 1e-8
        w, nodes, fval = two_sided(g, h, w0, w1, m)
        return w, nodes, fval

    def nodecount(energy: float) -> int:
        res = shoot(energy)
        if res[0] is None:
            return 0  # no classically allowed region: energy far too deep
        return res[1]

    # search window from the quantum-defect ansatz E = -2/(n - d)^2
    d_lo = -0.4
    d_hi = min(3.4, n - l - 0.6)
    e_hi = -2.0 / (n - d_lo) ** 2
    e_lo = -2.0 / (n - d_hi) ** 2
    counts = {e_lo: nodecount(e_lo), e_hi: nodecount(e_hi)}
    if counts[e_lo] > target or counts[e_hi] < target:
        raise ConvergenceError(
            f"state n={n} l={l} j={j}: node counts {counts[e_lo]}..{counts[e_hi]} "
            f"do not straddle target {target} in the search window",
            bracket=(e_lo, e_hi),
            node_counts=counts,
        )

    # locate an energy on the target-node plateau
    lo, hi = e_lo, e_hi
    seed = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        nm = nodecount(mid)
        if nm < target:
            lo = mid
        elif nm > target:
            hi = mid
        else:
            seed = mid
            break
    if seed is None:
        raise ConvergenceError(
            f"state n={n} l={l} j={j}: node plateau {target} not found",
            bracket=(e_lo, e_hi),
            node_counts=counts,
        )

    # refine both plateau edges; the eigenvalue lies strictly inside
    a, b = lo, seed
    for _ in range(80):
        mid = 0.5 * (a + b)
        if nodecount(mid) < target:
            a = mid
        else:
            b = mid
    plateau_lo = b
    a, b = seed, hi
    for _ in range(80):
        mid = 0.5 * (a + b)
        if nodecount(mid) > target:
            b = mid
        else:
            a = mid
    plateau_hi = a

    # matching residual is smooth in E once the matching index is frozen
    g_seed = base - 8.0 * seed * x2
    allowed = np.nonzero(g_seed < 0.0)[0]
    m_fix = int(min(max(allowed[-1], 2), n_pts - 3))

    def fval(energy: float) -> float:
        return shoot(energy, m_fixed=m_fix)[2]

    fa, fb = fval(plateau_lo), fval(plateau_hi)
    if not (math.isfinite(fa) and math.isfinite(fb)) or fa * fb > 0.0:
        raise ConvergenceError(
            f"state n={n} l={l} j={j}: no sign change of the matching "
            f"residual in [{plateau_lo:.12e}, {plateau_hi:.12e}] "
            f"(F = {fa:.3e}, {fb:.3e})",
            bracket=(plateau_lo, plateau_hi),
            node_counts={plateau_lo: target, plateau_hi: target},
        )
    energy = brentq(fval, plateau_lo, plateau_hi, xtol=abs(seed) * 1e-15, rtol=1e-15)

    w, nodes, _ = shoot(energy, m_fixed=m_fix)
    if nodes != target:
        raise ConvergenceError(
            f"state n={n} l={l} j={j}: converged solution has {nodes} nodes, "
            f"expected {target}",
            bracket=(plateau_lo, plateau_hi),
        )
    norm2 = 2.0 * np.trapezoid(w**2 * x2, dx=h)
    u = w * np.sqrt(x) / math.sqrt(norm2)
    return RadialState(n=n, l=l, j=j, energy=float(energy), grid=grid, u=u, nodes=nodes)


def radial_integral(a: RadialState, b: RadialState, k: int = 0) -> float:
    """<u_a| r^k |u_b> (Bohr^k); resamples by interpolation when the
    states live on different grids."""
    if k not in (0, 1, 2):
        raise ValueError(f"k must be 0, 1, or 2, got {k}")
    ga, gb = a.grid, b.grid
    if ga.x.shape == gb.x.shape and np.array_equal(ga.x, gb.x):
        x = ga.x
        ua, ub = a.u, b.u
        dx = ga.dx
    else:
        # resample onto the finer grid over the overlapping range
        fine, other = (a, b) if ga.dx <= gb.dx else (b, a)
        x = fine.grid.x
        ua = fine.u
        ub = np.interp(x, other.grid.x, other.u, left=0.0, right=0.0)
        dx = fine.grid.dx
    integrand = ua * ub * x ** (2 * k) * 2.0 * x
    return float(np.trapezoid(integrand, dx=dx))
