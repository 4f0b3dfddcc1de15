"""Tagged quantities and unit conversion between SI and atomic units.

A ``Quantity`` carries a value and a unit; arithmetic across mismatched
dimensions is rejected.  Conversions within a dimension rescale; the
physically defined cross-dimension bridges are

    energy <-> frequency            (E = h nu)
    energy <-> angular frequency    (E = hbar omega)
    frequency <-> angular frequency (omega = 2 pi nu)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .constants import CONST


class UnitError(ValueError):
    """Raised for undefined conversions or mixed-dimension arithmetic."""


class Dimension(enum.Enum):
    ENERGY = "energy"
    LENGTH = "length"
    FREQUENCY = "frequency"
    ANGULAR_FREQUENCY = "angular frequency"
    MAGNETIC_FIELD = "magnetic field"
    FIELD_GRADIENT = "field gradient"
    DIMENSIONLESS = "dimensionless"


class Unit(enum.Enum):
    """Supported units: (dimension, factor to the dimension's SI base)."""

    JOULE = (Dimension.ENERGY, 1.0)
    HARTREE = (Dimension.ENERGY, CONST.hartree)
    EV = (Dimension.ENERGY, CONST.e)
    METER = (Dimension.LENGTH, 1.0)
    MICROMETER = (Dimension.LENGTH, 1e-6)
    BOHR = (Dimension.LENGTH, CONST.a0)
    HERTZ = (Dimension.FREQUENCY, 1.0)
    KILOHERTZ = (Dimension.FREQUENCY, 1e3)
    MEGAHERTZ = (Dimension.FREQUENCY, 1e6)
    RAD_PER_SEC = (Dimension.ANGULAR_FREQUENCY, 1.0)
    TESLA = (Dimension.MAGNETIC_FIELD, 1.0)
    AU_MAGNETIC_FIELD = (Dimension.MAGNETIC_FIELD, CONST.b_atomic)
    VOLT_PER_M2 = (Dimension.FIELD_GRADIENT, 1.0)
    AU_FIELD_GRADIENT = (Dimension.FIELD_GRADIENT, CONST.gradient_atomic)
    DIMENSIONLESS = (Dimension.DIMENSIONLESS, 1.0)

    @property
    def dimension(self) -> Dimension:
        return self.value[0]

    @property
    def si_factor(self) -> float:
        return self.value[1]


# Bridges between dimensions: (from, to) -> multiplicative factor applied
# to the SI-base value of the source dimension.
_BRIDGES = {
    (Dimension.ENERGY, Dimension.FREQUENCY): 1.0 / CONST.h,
    (Dimension.FREQUENCY, Dimension.ENERGY): CONST.h,
    (Dimension.ENERGY, Dimension.ANGULAR_FREQUENCY): 1.0 / CONST.hbar,
    (Dimension.ANGULAR_FREQUENCY, Dimension.ENERGY): CONST.hbar,
    (Dimension.FREQUENCY, Dimension.ANGULAR_FREQUENCY): 2.0 * math.pi,
    (Dimension.ANGULAR_FREQUENCY, Dimension.FREQUENCY): 1.0 / (2.0 * math.pi),
}


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: Unit

    @property
    def si(self) -> float:
        """Value expressed in the SI base unit of its dimension."""
        return self.value * self.unit.si_factor

    def to(self, target: Unit) -> "Quantity":
        return convert(self, target)

    def __add__(self, other: "Quantity") -> "Quantity":
        if not isinstance(other, Quantity):
            return NotImplemented
        if other.unit.dimension is not self.unit.dimension:
            raise UnitError(
                f"cannot add {other.unit.dimension.value} to {self.unit.dimension.value}"
            )
        return Quantity(self.value + other.to(self.unit).value, self.unit)

    def __sub__(self, other: "Quantity") -> "Quantity":
        if not isinstance(other, Quantity):
            return NotImplemented
        if other.unit.dimension is not self.unit.dimension:
            raise UnitError(
                f"cannot subtract {other.unit.dimension.value} from {self.unit.dimension.value}"
            )
        return Quantity(self.value - other.to(self.unit).value, self.unit)

    def __mul__(self, factor: float) -> "Quantity":
        if isinstance(factor, Quantity):
            raise UnitError("quantity-quantity products are not supported")
        return Quantity(self.value * factor, self.unit)

    __rmul__ = __mul__


def convert(q: Quantity, target: Unit) -> Quantity:
    """Convert ``q`` to ``target``, using dimension bridges where defined."""
    src_dim = q.unit.dimension
    dst_dim = target.dimension
    si = q.si
    if src_dim is not dst_dim:
        factor = _BRIDGES.get((src_dim, dst_dim))
        if factor is None:
            raise UnitError(
                f"no defined conversion from {src_dim.value} to {dst_dim.value}"
            )
        si = si * factor
    return Quantity(si / target.si_factor, target)
