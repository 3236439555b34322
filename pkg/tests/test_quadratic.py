from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_quad_sqrt, conj_values, neg_pell_brute, pell_unit, squarefree
from unitforge.errors import DegenerateBeta
from unitforge.quadratic import (
    QuadElem,
    QuadField,
    delta,
    fundamental_unit,
    lemma51_witness,
    neg_pell_solvable,
    pell_report,
    quad_sqrt,
    signature_rank,
)

SQUAREFREE = [D for D in range(2, 120) if squarefree(D) == D]
H = Fraction(1, 2)


def q(D, x, y):
    return QuadElem(QuadField(D), Fraction(x), Fraction(y))


def test_field_validation():
    with pytest.raises(ValueError):
        QuadField(12)
    with pytest.raises(ValueError):
        QuadField(1)
    assert QuadField(5).disc == 5 and QuadField(3).disc == 12


@pytest.mark.parametrize(
    "D,eps,d",
    [(3, (2, 1), 6), (7, (8, 3), 2), (21, (H * 5, H), 7)],
)
def test_published_table(D, eps, d):
    K = QuadField(D)
    assert fundamental_unit(K) == q(D, *eps)
    assert delta(K) == d


# frozen from the y-scan oracle in tests/oracles.py
@pytest.mark.parametrize(
    "D,x,y",
    [(2, 1, 1), (5, H, H), (13, 3 * H, H), (29, 5 * H, H), (61, 39 * H, 5 * H), (109, 261 * H, 25 * H),
     (209, 46551, 3220), (94, 2143295, 221064)],
)
def test_fundamental_unit_frozen(D, x, y):
    assert fundamental_unit(QuadField(D)) == q(D, x, y)


@pytest.mark.parametrize("D", [D for D in SQUAREFREE if D not in (94,)])
def test_fundamental_unit_matches_oracle(D):
    e = fundamental_unit(QuadField(D))
    assert (e.x, e.y) == pell_unit(D, ymax=200_000)


@pytest.mark.parametrize("D,d", [(209, 11), (94, 2)])
def test_delta_frozen(D, d):
    assert delta(QuadField(D)) == d


def test_delta_rejects_norm_minus_one():
    with pytest.raises(Exception):
        delta(QuadField(2))


@pytest.mark.parametrize("D", SQUAREFREE)
def test_pell_consistency(D):
    r = pell_report(D)
    assert r.consistent()
    e = fundamental_unit(QuadField(D))
    if r.neg_pell_solvable:
        # e or e^3 has integral coordinates and norm -1
        f = e if e.y.denominator == 1 else e**3
        assert f.norm() == -1 and neg_pell_brute(D, int(f.y))
    elif e.y < 2000:
        assert not neg_pell_brute(D, int(e.y))
    assert neg_pell_solvable(D) == (fundamental_unit(QuadField(D)).norm() == -1)


@pytest.mark.parametrize("D", [D for D in SQUAREFREE if fundamental_unit(QuadField(D)).norm() == 1])
def test_lemma51_and_delta(D):
    K = QuadField(D)
    e = fundamental_unit(K)
    beta, t = lemma51_witness(e)
    assert e * beta * beta == t == (e + 1).trace()
    d = delta(K)
    assert K.disc % d == 0 and d not in (1, K.disc, D)
    assert quad_sqrt(e * d) is not None


def test_lemma51_degenerate():
    with pytest.raises(DegenerateBeta):
        lemma51_witness(-QuadField(3).one())


def test_arithmetic_identities():
    a, b = q(5, H, H), q(5, 3, -2)
    assert a * a == a + 1  # golden ratio
    assert (a * b).norm() == a.norm() * b.norm()
    assert a * a.inverse() == 1
    assert a**-3 * a**3 == 1
    assert a.conjugate().conjugate() == a
    assert (a + b).trace() == a.trace() + b.trace()


@given(st.integers(-30, 30), st.integers(-30, 30), st.sampled_from([2, 3, 5, 6, 7, 13, 21]))
def test_sign_matches_float(x, y, D):
    e = q(D, x, y)
    v = conj_values(D, x, y)[0]
    if abs(v) > 1e-9:
        assert e.sign() == (1 if v > 0 else -1)
    assert e.house() >= e.abs()


@given(st.integers(-20, 20), st.integers(-20, 20), st.sampled_from([2, 3, 5, 7, 21]))
def test_quad_sqrt_of_squares(x, y, D):
    s = q(D, x, y)
    r = quad_sqrt(s * s)
    assert r is not None and r * r == s * s


@pytest.mark.parametrize("D,x,y", [(3, 2, 1), (21, H * 5, H), (7, 8, 3), (5, 3, 0), (2, 2, 1)])
def test_quad_sqrt_matches_brute(D, x, y):
    got = quad_sqrt(q(D, x, y))
    want = brute_quad_sqrt(D, x, y, bound=12)
    assert (got is None) == (want is None)


def test_two_plus_sqrt3_not_square():
    assert quad_sqrt(q(3, 2, 1)) is None


def test_signature_rank():
    assert signature_rank(QuadField(3)) == (1, 2)
    assert signature_rank(QuadField(2)) == (2, 1)
    assert signature_rank(QuadField(5)) == (2, 1)


def test_json_roundtrip():
    e = q(21, H * 5, H)
    assert QuadElem.from_json(e.to_json()) == e
    assert str(e) == "5/2 + 1/2*sqrt(21)"


def test_mixed_fields_rejected():
    with pytest.raises((ValueError, TypeError)):
        q(2, 1, 1) + q(3, 1, 1)
