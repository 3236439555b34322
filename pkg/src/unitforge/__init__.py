"""Exact arithmetic for real quadratic and multiquadratic fields: units, square
classes, quadratic lattices and heights."""

from __future__ import annotations

__version__ = "0.1.0"

from .basefield import QQ
from .biquadratic import BiquadElem, BiquadField
from .lattices import GramLattice
from .quadratic import QuadElem, QuadField, delta, fundamental_unit

__all__ = [
    "QQ",
    "BiquadElem",
    "BiquadField",
    "GramLattice",
    "QuadElem",
    "QuadField",
    "delta",
    "fundamental_unit",
]
