from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from oracles import conj_values, quad_integers_box
from unitforge.basefield import QQ
from unitforge.biquadratic import BiquadField
from unitforge.errors import MaxIterExceeded, NotIntegral, RepresentationNotFound
from unitforge.lattices import GramLattice
from unitforge.northcott import (
    below_threshold,
    descent_constant_sq,
    descent_run,
    descent_step,
    enumerate_tp_integers,
    house_of,
    northcott_profile,
    weil_height,
)
from unitforge.quadratic import QuadElem, QuadField

H = Fraction(1, 2)
K2, K3, K5 = QuadField(2), QuadField(3), QuadField(5)


def brute_enumerate(D: int, r: Fraction, widen: int = 1):
    """Totally positive integers with house < r on a grid widened by ``widen``."""
    bound = math.ceil(r) + widen
    out = set()
    for x, y in quad_integers_box(D, bound):
        s1, s2 = conj_values(D, x, y)
        if min(s1, s2) > 1e-12 and max(abs(s1), abs(s2)) < float(r) - 1e-12:
            out.add((x, y))
    return out


@pytest.mark.parametrize(
    "e,h",
    [(K3(2, 1), 0.5 * math.log(2 + math.sqrt(3))), (Fraction(5), math.log(5)), (K5(H, H), 0.5 * math.log((1 + math.sqrt(5)) / 2))],
)
def test_weil_height_examples(e, h):
    r = weil_height(e)
    assert abs(r.weil - h) <= r.weil_error + 1e-12
    assert r.inequality_exact


def test_weil_height_degree_detection():
    F = BiquadField(3, 7)
    assert weil_height(F(2, 1, 0, 0)).degree == 2
    assert weil_height(F(3, 0, 0, 0)).degree == 1
    assert weil_height(F(1, 1, 1, 0)).degree == 4
    assert weil_height(K5(7, 0)).degree == 1


def test_weil_height_rejects_non_integers():
    with pytest.raises(NotIntegral):
        weil_height(K3(H, 0))
    with pytest.raises(ValueError):
        weil_height(K3(0, 0))


def test_height_inequality_random():
    rng = random.Random(11)
    for _ in range(100):
        D = rng.choice([2, 3, 5, 6, 13, 21])
        half = D % 4 == 1
        u, v = rng.randint(-60, 60), rng.randint(-60, 60)
        if half:
            v += (u - v) % 2
            e = QuadElem(QuadField(D), Fraction(u, 2), Fraction(v, 2))
        else:
            e = QuadElem(QuadField(D), u, v)
        if not e:
            continue
        r = weil_height(e)
        assert r.inequality_exact
        assert r.weil <= r.log_house + r.weil_error + 1e-12


def test_enumerate_examples():
    assert enumerate_tp_integers(K2, 3) == [K2(1, 0), K2(2, 0)]
    assert enumerate_tp_integers(K5, 2) == [K5(1, 0)]
    for K in (K2, K3, K5):
        assert enumerate_tp_integers(K, 1) == []


def test_enumerate_on_boundary_is_exact():
    # house(2 + sqrt 2) = 2 + sqrt 2 sits just above 3.414; r equal to a rational just above/below
    assert K2(2, 1) in enumerate_tp_integers(K2, Fraction(3415, 1000))
    assert K2(2, 1) not in enumerate_tp_integers(K2, Fraction(3414, 1000))
    # house exactly r is excluded
    assert K2(3, 0) not in enumerate_tp_integers(K2, 3)


@pytest.mark.parametrize("D,r", [(2, 7), (3, Fraction(19, 2)), (5, 6), (13, 11), (21, 8), (6, 5)])
def test_enumerate_matches_widened_grid(D, r):
    got = {(a.x, a.y) for a in enumerate_tp_integers(QuadField(D), r)}
    assert got == brute_enumerate(D, Fraction(r))


def test_profile():
    p = northcott_profile([K2, K3, K5], 3)
    # recounted by brute force: D=5 gives 1, 2 and (3 +- sqrt 5)/2
    assert p.counts == [2, 2, 4] and p.cumulative == 8
    assert northcott_profile([K2, K3], 1).counts == [0, 0]
    assert "lower bound" in p.to_json()["label"]
    assert p.to_csv().splitlines()[0] == "D,r,count"


I4 = GramLattice.identity(QQ, 4)
I3_5 = GramLattice.identity(K5, 3)


def test_descent_step_examples():
    assert descent_step(I4, 30, [1, 2, 3, 4]) == [3, 5, 7, 9]
    assert descent_step(I4, 1, [1, 0, 0, 0]) == [1, 3]
    out = descent_step(I3_5, 2 + K5(H, H))
    assert 1 <= len(out) <= 3 and all(K5.is_totally_positive(b) for b in out)
    with pytest.raises(RepresentationNotFound):
        descent_step(GramLattice.identity(QQ, 3), 7)


def test_descent_step_bound():
    rng = random.Random(3)
    for _ in range(40):
        beta = rng.randint(1, 5000)
        for bj in descent_step(I4, beta):
            assert bj <= 2 * math.sqrt(beta) + 1 + 1e-9  # C = 1


def test_threshold_exact():
    assert below_threshold(Fraction(8), Fraction(1))
    assert not below_threshold(Fraction(9), Fraction(1))
    assert descent_constant_sq(I4) == 1
    L = GramLattice.diagonal(K5, [1, K5(H, H) ** 2])
    c2 = descent_constant_sq(L)
    assert c2 == (K5(H, H) ** 2).conjugate().inverse()


def test_descent_run_examples():
    tr = descent_run(I4, 10000)
    assert tr.terminated and set(tr.levels[-1]) <= set(range(1, 9))
    assert len(tr.levels) - 1 <= 6 and tr.monotone_above_threshold()
    assert descent_run(I4, 5).levels == [[5]]
    tr = descent_run(I3_5, K5(20, 3))
    assert tr.terminated and all(float(house_of(b)) < 9 for b in tr.levels[-1])
    doc = tr.to_json()
    assert doc["C"] == "1" and doc["threshold"] == "9"


def test_descent_max_iter():
    with pytest.raises(MaxIterExceeded) as exc:
        descent_run(I4, 10**6, max_iter=1)
    assert len(exc.value.trace.levels) == 2
