from __future__ import annotations

import math
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from unitforge.biquadratic import BiquadField
from unitforge.exactreal import ExactReal, sqrt_enclosure
from unitforge.quadratic import QuadField


@given(st.integers(2, 10**6), st.integers(8, 120))
def test_sqrt_enclosure(d, bits):
    lo, hi = sqrt_enclosure(d, bits)
    assert lo * lo <= d <= hi * hi
    assert hi - lo <= Fraction(1, 2**bits)


def test_exact_comparisons():
    K = QuadField(2)
    r2 = ExactReal(K.sqrt)
    assert r2 > Fraction(141421356, 10**8)
    assert r2 < Fraction(141421357, 10**8)
    assert ExactReal(K(3, 0)) == 3
    assert ExactReal(K(1, 1)).floor() == 2
    assert ExactReal(Fraction(-7, 2)).floor() == -4


@given(st.integers(-200, 200), st.integers(-50, 50))
def test_floor_matches_float(x, y):
    e = QuadField(7)(x, y)
    v = x + y * math.sqrt(7)
    if abs(v - round(v)) > 1e-6:
        assert ExactReal(e).floor() == math.floor(v)


def test_biquad_floor_and_error_ball():
    F = BiquadField(3, 7)
    e = F(0, 1, 1, 0)  # sqrt3 + sqrt7
    x = ExactReal(e)
    assert x.floor() == 4
    assert abs(x.float_approx - (math.sqrt(3) + math.sqrt(7))) <= x.error_radius + 1e-15
