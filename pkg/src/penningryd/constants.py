"""Physical constants (CODATA via scipy) and atomic-unit conversion factors.

All internal atomic-structure computation runs in Hartree atomic units;
SI values appear only at API boundaries.
"""

from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in SI units plus derived atomic units."""

    e: float = _sc.e                      # elementary charge (C)
    m_e: float = _sc.m_e                  # electron mass (kg)
    hbar: float = _sc.hbar                # reduced Planck constant (J s)
    h: float = _sc.h                      # Planck constant (J s)
    eps0: float = _sc.epsilon_0           # vacuum permittivity (F/m)
    c: float = _sc.c                      # speed of light (m/s)
    a0: float = _sc.physical_constants["Bohr radius"][0]          # (m)
    hartree: float = _sc.physical_constants["Hartree energy"][0]  # (J)
    amu: float = _sc.atomic_mass          # unified atomic mass unit (kg)
    g_s: float = 2.00231930436256         # electron spin g-factor (magnitude)
    alpha_fs: float = _sc.alpha           # fine-structure constant

    @property
    def b_atomic(self) -> float:
        """Atomic unit of magnetic field, hbar/(e a0^2) ~ 2.3505e5 T."""
        return self.hbar / (self.e * self.a0**2)

    @property
    def gradient_atomic(self) -> float:
        """Atomic unit of electric field gradient, E_h/(e a0^2) (V/m^2)."""
        return self.hartree / (self.e * self.a0**2)

    @property
    def efield_atomic(self) -> float:
        """Atomic unit of electric field, E_h/(e a0) (V/m)."""
        return self.hartree / (self.e * self.a0)

    @property
    def coulomb(self) -> float:
        """e^2/(4 pi eps0) in SI (J m)."""
        return self.e**2 / (4.0 * _sc.pi * self.eps0)


CONST = PhysicalConstants()
