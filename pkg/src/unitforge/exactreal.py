"""Real algebraic numbers held exactly, with certified rational enclosures."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering


def sqrt_enclosure(d: int, bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic interval [lo, hi] containing sqrt(d), of width <= 2**-bits."""
    scale = 1 << bits
    r = math.isqrt(d * scale * scale)
    if r * r == d * scale * scale:
        return Fraction(r, scale), Fraction(r, scale)
    return Fraction(r, scale), Fraction(r + 1, scale)


def scale_interval(c: Fraction, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    a, b = c * lo, c * hi
    return (a, b) if a <= b else (b, a)


@total_ordering
class ExactReal:
    """A real number given by an exact field element under its identity embedding.

    ``value`` is a Fraction, QuadElem or BiquadElem; anything exposing
    ``sign()`` and ``enclosure(bits)``. Comparisons are decided exactly.
    """

    __slots__ = ("value",)

    def __init__(self, value) -> None:
        if isinstance(value, int):
            value = Fraction(value)
        self.value = value

    def sign(self) -> int:
        if isinstance(self.value, Fraction):
            return (self.value > 0) - (self.value < 0)
        return self.value.sign()

    def enclosure(self, bits: int = 60) -> tuple[Fraction, Fraction]:
        if isinstance(self.value, Fraction):
            return self.value, self.value
        return self.value.enclosure(bits)

    @property
    def float_approx(self) -> float:
        lo, hi = self.enclosure(60)
        return float((lo + hi) / 2)

    @property
    def error_radius(self) -> float:
        lo, hi = self.enclosure(60)
        # round outward so the float ball really contains the value
        return float((hi - lo) / 2) + abs(self.float_approx) * 2**-52

    def __float__(self) -> float:
        return self.float_approx

    def _cmp(self, other) -> int:
        if isinstance(other, ExactReal):
            other = other.value
        return ExactReal(self.value - other).sign()

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ExactReal, int, Fraction)) and type(other) is not type(self.value):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        return hash(self.value)

    def floor(self) -> int:
        if isinstance(self.value, Fraction):
            return math.floor(self.value)
        lo, _ = self.enclosure(64)
        n = math.floor(lo)
        while self._cmp(n) < 0:
            n -= 1
        while self._cmp(n + 1) >= 0:
            n += 1
        return n

    def __repr__(self) -> str:
        return f"ExactReal({self.value} ~ {self.float_approx:.6g})"
