"""Rydberg ions in a Penning trap.

Numerical tools for the electronic structure of a Rydberg ion in crossed
magnetic and electric quadrupole fields, the mechanics of small rotating
ion crystals, microwave-dressed Rydberg pair interactions, and the
resulting frustrated spin models.
"""

__version__ = "0.1.0"

from .constants import CONST, PhysicalConstants
from .units import Dimension, Quantity, Unit, UnitError, convert

__all__ = [
    "CONST",
    "PhysicalConstants",
    "Dimension",
    "Quantity",
    "Unit",
    "UnitError",
    "convert",
    "__version__",
]
