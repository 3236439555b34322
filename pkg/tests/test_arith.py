from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import squarefree, trial_factor
from unitforge.arith import (
    FactorizationIncomplete,
    SquareClassVector,
    cf_sqrt,
    factorize,
    gf2_express,
    gf2_rank,
    is_perfect_square,
    is_probable_prime,
    rational_sqrt,
    squarefree_kernel,
    squarefree_part,
    subset_search,
)


@given(st.integers(min_value=1, max_value=10**7))
def test_factorize_matches_trial_division(n):
    assert factorize(n) == trial_factor(n)


@given(st.integers(min_value=1, max_value=10**7))
def test_squarefree_part_reassembles(n):
    d = squarefree_part(n)
    assert d.s * d.r * d.r == n
    assert d.s == squarefree(n)


def test_squarefree_of_18():
    d = squarefree_part(18)
    assert (d.s, d.r) == (2, 3)


def test_large_prime_cofactor_is_accepted():
    p = 1_000_000_007
    assert factorize(6 * p) == {2: 1, 3: 1, p: 1}


def test_unresolved_cofactor_raises():
    p, q = 1_000_003, 1_000_033  # both above the trial bound
    with pytest.raises(FactorizationIncomplete):
        factorize(p * q, bound=1000)


@pytest.mark.parametrize("n,expected", [(2, True), (561, False), (7919, True), (2**61 - 1, True), (2**61 + 1, False)])
def test_primality(n, expected):
    assert is_probable_prime(n) is expected


def test_primality_agrees_with_trial_division():
    for n in range(2, 5000):
        assert is_probable_prime(n) == (trial_factor(n) == {n: 1})


def test_squares():
    assert is_perfect_square(0) and is_perfect_square(144)
    assert not is_perfect_square(3) and not is_perfect_square(-4)
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert squarefree_kernel(Fraction(8, 3)) == 6
    assert squarefree_kernel(Fraction(-1, 4)) == -1


@pytest.mark.parametrize("D,a0,period", [(2, 1, (2,)), (3, 1, (1, 2)), (7, 2, (1, 1, 1, 4)), (13, 3, (1, 1, 1, 1, 6))])
def test_cf_sqrt(D, a0, period):
    cf = cf_sqrt(D)
    assert cf.a0 == a0 and cf.period == period


def test_convergents_approach_sqrt():
    conv = cf_sqrt(2).convergents()
    pairs = [next(conv) for _ in range(6)]
    assert pairs[:4] == [(1, 1), (3, 2), (7, 5), (17, 12)]


def test_square_class_vector_product():
    a, b = SquareClassVector.of(6), SquareClassVector.of(-10)
    assert (a * b).value == SquareClassVector.of(-15).value
    assert SquareClassVector.of(Fraction(4, 9)).is_trivial()


def _random_instance(rng: random.Random):
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23]
    k = rng.randint(0, 15)
    basis = []
    for _ in range(k):
        n = rng.choice([-1, 1]) * rng.randint(1, 5000)
        basis.append(SquareClassVector.of(n))
    target = SquareClassVector.of(rng.choice([-1, 1]) * rng.randint(1, 5000) * rng.choice(primes))
    return target, basis


def _product_class(basis, combo):
    prod = 1
    for i in combo:
        prod *= basis[i].value
    return SquareClassVector.of(prod)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_gf2_express_matches_subset_search(rng):
    target, basis = _random_instance(rng)
    got, want = gf2_express(target, basis), subset_search(target, basis)
    assert (got is None) == (want is None)
    if got is not None:
        assert _product_class(basis, got) == target


def test_gf2_rank():
    vecs = [SquareClassVector.of(n) for n in (2, 3, 6, 5, 30)]
    assert gf2_rank(vecs) == 3
    assert gf2_rank([]) == 0
