"""The rational base field and integral box enumeration shared by lattices and heights."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Union

from .biquadratic import BiquadElem, BiquadField
from .quadratic import QuadElem, QuadField


class RationalField:
    """Q as a base field, with the same duck-typed interface as QuadField."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def coerce(self, v) -> Fraction:
        if isinstance(v, (QuadElem, BiquadElem)):
            raise ValueError(f"{v} is not rational")
        return Fraction(v)

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def is_integral(self, e) -> bool:
        return self.coerce(e).denominator == 1

    def is_totally_positive(self, e) -> bool:
        return self.coerce(e) > 0

    def is_unit(self, e) -> bool:
        return abs(self.coerce(e)) == 1

    def conjugates(self, e) -> list[Fraction]:
        return [self.coerce(e)]

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("Q")

    def __repr__(self) -> str:
        return "QQ"

    __str__ = __repr__


QQ = RationalField()

BaseField = Union[RationalField, QuadField, BiquadField]
Elem = Union[Fraction, QuadElem, BiquadElem]


def real_value(e) -> float:
    return float(e)


def sign(e) -> int:
    if isinstance(e, (int, Fraction)):
        return (e > 0) - (e < 0)
    return e.sign()


def conjugates(base: BaseField, e) -> list:
    """Conjugates as field elements; the real value of each is its identity embedding."""
    return base.conjugates(e)


def is_totally_nonnegative(base: BaseField, e) -> bool:
    return all(sign(c) >= 0 for c in conjugates(base, e))


def degree(base: BaseField) -> int:
    if isinstance(base, RationalField):
        return 1
    if isinstance(base, QuadField):
        return 2
    return 4


def integral_points(base: RationalField | QuadField, bounds: list[tuple[float, float]]) -> Iterator:
    """Integers of the base whose conjugates lie (roughly) in the given boxes.

    The result is a superset: bounds are widened by a unit margin, so callers
    must filter with an exact predicate. Conjugate order follows
    ``base.conjugates``. Sizes are assumed moderate (|values| < 1e12) so the
    float margin dominates rounding error.
    """
    if isinstance(base, RationalField):
        (lo, hi), = bounds
        for x in range(math.floor(lo) - 1, math.ceil(hi) + 2):
            yield Fraction(x)
        return
    if not isinstance(base, QuadField):
        raise TypeError(f"box enumeration is not available over {base}")
    (lo1, hi1), (lo2, hi2) = bounds
    D = base.D
    r = math.sqrt(D)
    # alpha = (u + v sqrt D)/2, sigma1 = (u + v r)/2, sigma2 = (u - v r)/2
    vmin = math.floor((lo1 - hi2) / r) - 1
    vmax = math.ceil((hi1 - lo2) / r) + 1
    half = D % 4 == 1
    for v in range(vmin, vmax + 1):
        if not half and v % 2:
            continue
        ulo = max(2 * lo1 - v * r, 2 * lo2 + v * r)
        uhi = min(2 * hi1 - v * r, 2 * hi2 + v * r)
        u0, u1 = math.floor(ulo) - 2, math.ceil(uhi) + 2
        for u in range(u0, u1 + 1):
            if (u - v) % 2:
                continue
            if not half and u % 2:
                continue
            yield QuadElem(base, Fraction(u, 2), Fraction(v, 2))
