"""Ionic species parameters for the model potential of the Rydberg electron.

The valence (Rydberg) electron of a singly charged ion moves in the field
of a doubly charged core.  Its effective potential is parameterized per
orbital angular momentum l by three screening coefficients and a core
cutoff radius, plus the static dipole polarizability of the core.

File format (plain text, ``#`` comments allowed):

    <label> <Z_nuc> <mass_amu> <alpha_cp>
    <l> <alpha1> <alpha2> <alpha3> <r_c>
    ...

One row per l, contiguous from l = 0.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path

from .constants import CONST


class SpeciesError(ValueError):
    """Raised for malformed species files or missing l rows."""


@dataclass(frozen=True)
class LChannel:
    """Screening parameters of one orbital-angular-momentum channel."""

    alpha1: float
    alpha2: float
    alpha3: float
    r_c: float


@dataclass(frozen=True)
class SpeciesParams:
    label: str
    z_nuc: int
    mass_amu: float
    alpha_cp: float          # core dipole polarizability (atomic units)
    channels: tuple[LChannel, ...]

    @property
    def mass_kg(self) -> float:
        return self.mass_amu * CONST.amu

    @property
    def l_max(self) -> int:
        return len(self.channels) - 1

    def channel(self, l: int) -> LChannel:
        if l < 0 or l > self.l_max:
            raise SpeciesError(
                f"species '{self.label}' has no parameters for l={l} "
                f"(rows cover l=0..{self.l_max})"
            )
        return self.channels[l]

    @property
    def is_coulombic(self) -> bool:
        """True when the potential reduces to a pure -2/r Coulomb tail."""
        return (
            self.z_nuc == 2
            and self.alpha_cp == 0.0
            and all(ch.alpha2 == 0.0 for ch in self.channels)
        )


def _parse_floats(parts: list[str], n: int, where: str) -> list[float]:
    if len(parts) != n:
        raise SpeciesError(f"{where}: expected {n} fields, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise SpeciesError(f"{where}: non-numeric field ({exc})") from None


def load_species(path: str | Path) -> SpeciesParams:
    """Load and validate a species parameter file."""
    path = Path(path)
    if not path.exists():
        raise SpeciesError(f"species file not found: {path}")
    lines = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise SpeciesError(f"{path}: empty species file")

    head = lines[0].split()
    if len(head) != 4:
        raise SpeciesError(f"{path}: header must be '<label> <Z> <mass_amu> <alpha_cp>'")
    label = head[0]
    z_nuc_f, mass_amu, alpha_cp = _parse_floats(head[1:], 3, f"{path}: header")
    z_nuc = int(z_nuc_f)
    if z_nuc != z_nuc_f or z_nuc < 2:
        raise SpeciesError(f"{path}: Z_nuc must be an integer >= 2, got {z_nuc_f}")
    if mass_amu <= 0:
        raise SpeciesError(f"{path}: mass must be positive")
    if alpha_cp < 0:
        raise SpeciesError(f"{path}: alpha_cp must be non-negative")

    rows: dict[int, LChannel] = {}
    for k, line in enumerate(lines[1:], start=2):
        vals = _parse_floats(line.split(), 5, f"{path}:{k}")
        l = int(vals[0])
        if l != vals[0] or l < 0:
            raise SpeciesError(f"{path}:{k}: l must be a non-negative integer")
        if l in rows:
            raise SpeciesError(f"{path}:{k}: duplicate row for l={l}")
        if vals[4] <= 0:
            raise SpeciesError(f"{path}:{k}: cutoff radius r_c must be positive")
        rows[l] = LChannel(vals[1], vals[2], vals[3], vals[4])
    if not rows:
        raise SpeciesError(f"{path}: no l rows")
    l_max = max(rows)
    missing = [l for l in range(l_max + 1) if l not in rows]
    if missing:
        raise SpeciesError(f"{path}: missing l rows {missing}")

    return SpeciesParams(
        label=label,
        z_nuc=z_nuc,
        mass_amu=mass_amu,
        alpha_cp=alpha_cp,
        channels=tuple(rows[l] for l in range(l_max + 1)),
    )


def bundled_species_path(name: str) -> Path:
    """Path of a species file shipped with the package (e.g. 'ca40')."""
    res = importlib.resources.files("penningryd").joinpath(f"data/{name}.txt")
    p = Path(str(res))
    if not p.exists():
        raise SpeciesError(f"no bundled species '{name}'")
    return p


def load_bundled(name: str) -> SpeciesParams:
    return load_species(bundled_species_path(name))
