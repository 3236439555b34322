"""Acceptance criteria, one test each. Every test records a PASS/FAIL line that is
printed in the pytest summary (and directly when this file is run as a script)."""

from __future__ import annotations

import json
import math
import random
import time
from fractions import Fraction

import pytest

from oracles import conj_values, quad_integers_box, squarefree
from unitforge.arith import SquareClassVector, gf2_express, subset_search
from unitforge.basefield import QQ
from unitforge.biquadratic import (
    BiquadField,
    biquad_sqrt,
    cor63_test,
    prop65_admissible,
    prop65_discriminants,
    prop65_mu,
    rel_norm,
)
from unitforge.lattices import GramLattice, diagonal_universal_2n, rank_lower_bound_run, subset_products
from unitforge.northcott import descent_run, enumerate_tp_integers, house_of, weil_height
from unitforge.quadratic import QuadElem, QuadField, delta, fundamental_unit, has_prime_3_mod_4, pell_report
from unitforge.squareclasses import theorem72_certificate, verify_certificate

H = Fraction(1, 2)
RESULTS: list[str] = []


class Criterion:
    def __init__(self, number: int, title: str, limit: float | None = None) -> None:
        self.number, self.title, self.limit = number, title, limit
        self.notes = ""

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and (self.limit is None or elapsed < self.limit)
        limit = f" (limit {self.limit:g}s)" if self.limit else ""
        extra = f" [{self.notes}]" if self.notes else ""
        why = "" if ok else (f": {exc_type.__name__}: {exc}" if exc_type else ": over time limit")
        line = f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'} {self.title} {elapsed:.2f}s{limit}{extra}{why}"
        RESULTS.append(line)
        print(line)
        if exc_type is None and not ok:
            pytest.fail(f"criterion {self.number} exceeded {self.limit}s ({elapsed:.2f}s)")
        return False


def test_criterion_01_unit_table():
    with Criterion(1, "fundamental units and delta for D = 3, 7, 21", 1.0):
        want = {3: (QuadField(3)(2, 1), 6), 7: (QuadField(7)(8, 3), 2), 21: (QuadField(21)(5 * H, H), 7)}
        for D, (eps, d) in want.items():
            K = QuadField(D)
            assert fundamental_unit(K) == eps
            assert delta(K) == d


def test_criterion_02_biquadratic_roots():
    with Criterion(2, "square roots in Q(sqrt3, sqrt7)", 1.0):
        F = BiquadField(3, 7)
        e1 = F.embed(QuadField(3)(2, 1))
        e2 = F.embed(QuadField(7)(8, 3))
        e3 = F.embed(QuadField(21)(5 * H, H))
        cases = [
            (e1 * e2, F(3 * H, 3 * H, H, H)),
            (e3, F(0, H, H, 0)),
            (e1 * e2 * e3, F(4, 5 * H, 3 * H, 1)),
        ]
        for target, root in cases:
            assert root * root == target
            s = biquad_sqrt(target)
            assert s is not None and s * s == target and s in (root, -root)
            assert not root.is_totally_positive() and not root.is_totally_negative()


def test_criterion_03_family():
    with Criterion(3, "mu(n) for the first 10 admissible n", 10.0) as c:
        ns = [n for n in range(1, 10**4, 12) if prop65_admissible(n)][:10]
        assert len(ns) == 10
        for n in ns:
            mu = prop65_mu(n)
            _, d2, d3 = prop65_discriminants(n)
            assert mu.is_unit() and mu.is_totally_positive()
            assert rel_norm(mu, 1) == 1
            assert rel_norm(mu, 2) == QuadElem(QuadField(d2), Fraction(3 * n + 2, 2), H)
            assert rel_norm(mu, 3) == QuadElem(QuadField(d3), 6 * n + 7, 2)
            assert not cor63_test(mu).in_Q_square_class
        c.notes = f"n = {ns}"


def test_criterion_04_pell_equivalences():
    with Criterion(4, "negative Pell equivalences for squarefree D <= 500", 60.0) as c:
        bad = []
        Ds = [D for D in range(2, 501) if squarefree(D) == D]
        for D in Ds:
            r = pell_report(D)
            if not r.consistent():
                bad.append(D)
            if has_prime_3_mod_4(D) and r.norm_eps != 1:
                bad.append(D)
        c.notes = f"{len(Ds)} fields, {len(bad)} violations"
        assert not bad, bad


def test_criterion_05_lemma_identity():
    with Criterion(5, "e*(conj(e)+1)^2 = Tr(e+1) and delta | disc for D <= 200", None) as c:
        bad, count = [], 0
        for D in range(2, 201):
            if squarefree(D) != D:
                continue
            K = QuadField(D)
            e = fundamental_unit(K)
            if e.norm() != 1:
                continue
            count += 1
            beta = e.conjugate() + 1
            if e * beta * beta != (e + 1).trace():
                bad.append(D)
            d = delta(K)
            if K.disc % d or d in (1, K.disc):
                bad.append(D)
        c.notes = f"{count} fields, {len(bad)} violations"
        assert not bad, bad


def test_criterion_06_kummer_oracle():
    with Criterion(6, "GF(2) elimination vs exhaustive subset search, 200 instances", None) as c:
        rng = random.Random(20240601)
        hits = 0
        for _ in range(200):
            k = rng.randint(0, 15)
            basis = [SquareClassVector.of(rng.choice([-1, 1]) * rng.randint(1, 3000)) for _ in range(k)]
            if basis and rng.random() < 0.5:
                # a target inside the span, so both outcomes are exercised
                prod = SquareClassVector(frozenset())
                for v in basis:
                    if rng.random() < 0.5:
                        prod = prod * v
                target = prod
            else:
                target = SquareClassVector.of(rng.choice([-1, 1]) * rng.randint(1, 3000))
            got, want = gf2_express(target, basis), subset_search(target, basis)
            assert (got is None) == (want is None)
            if got is not None:
                hits += 1
                prod = SquareClassVector(frozenset())
                for i in got:
                    prod = prod * basis[i]
                assert prod == target
        c.notes = f"{hits} in span, {200 - hits} outside"


def test_criterion_07_certificate():
    with Criterion(7, "certificate of 5 distinct totally positive unit classes", 30.0) as c:
        cert = theorem72_certificate(5)
        doc = json.loads(json.dumps(cert.to_json()))
        assert len(doc["units"]) == 5
        assert verify_certificate(doc)
        c.notes = "fields " + ", ".join(f"({u['field']['d1']},{u['field']['d2']})" for u in doc["units"])


def test_criterion_08_rank_lower_bound():
    with Criterion(8, "rank lower bound on the 2^n diagonal forms over Q(sqrt3)", None) as c:
        K = QuadField(3)
        eps = K(2, 1)
        flags = []
        for n in range(4):
            e = [eps ** (2**j) for j in range(n)]
            L = diagonal_universal_2n(K, e)
            out = rank_lower_bound_run(L, subset_products(K, e))
            assert out.kind == "SplitsCompleted" and out.splits == 2**n
            flags.append(out.classes_distinct)
        miss = rank_lower_bound_run(GramLattice.identity(K, 1), [eps])
        assert miss.kind == "RepresentationNotFound" and miss.failed_unit == eps
        assert miss.evidence["exhaustive"]
        c.notes = f"unit classes pairwise distinct for n=0..3: {flags}"


def _random_tp_q5(rng, max_house):
    K = QuadField(5)
    while True:
        u, v = rng.randint(1, 2 * max_house), rng.randint(-max_house, max_house)
        if (u - v) % 2:
            continue
        e = K(Fraction(u, 2), Fraction(v, 2))
        if e.is_totally_positive() and house_of(e) <= max_house:
            return e


def test_criterion_09_descent():
    with Criterion(9, "descent contraction on I4 over Q and I3 over Q(sqrt5)", 60.0) as c:
        rng = random.Random(9)
        I4 = GramLattice.identity(QQ, 4)
        worst = 0
        for _ in range(100):
            alpha = rng.randint(1, 10**4)
            tr = descent_run(I4, alpha, max_iter=8)
            assert tr.terminated and all(x < 9 for x in tr.levels[-1])
            assert tr.monotone_above_threshold()
            worst = max(worst, len(tr.levels) - 1)
        I3 = GramLattice.identity(QuadField(5), 3)
        worst5 = 0
        for _ in range(20):
            alpha = _random_tp_q5(rng, 100)
            tr = descent_run(I3, alpha, max_iter=20)
            assert tr.terminated and all(float(house_of(x)) < 9 for x in tr.levels[-1])
            assert tr.monotone_above_threshold()
            worst5 = max(worst5, len(tr.levels) - 1)
        c.notes = f"max iterations {worst} over Q, {worst5} over Q(sqrt5)"


def _brute_enumerate(D, r):
    bound = math.ceil(r) + 1
    out = set()
    for x, y in quad_integers_box(D, bound):
        s1, s2 = conj_values(D, x, y)
        if min(s1, s2) > 1e-12 and max(s1, s2) < float(r) - 1e-12:
            out.add((x, y))
    return out


def test_criterion_10_heights_and_enumeration():
    with Criterion(10, "height inequality on 500 elements; enumeration vs widened grid on 50 pairs", None):
        rng = random.Random(10)
        fields = [D for D in range(2, 60) if squarefree(D) == D]
        done = 0
        while done < 500:
            D = rng.choice(fields)
            K = QuadField(D)
            u, v = rng.randint(-300, 300), rng.randint(-300, 300)
            if D % 4 == 1:
                v += (u - v) % 2
                e = K(Fraction(u, 2), Fraction(v, 2))
            else:
                e = K(u, v)
            if not e:
                continue
            r = weil_height(e)
            assert r.inequality_exact
            assert r.weil <= r.log_house + r.weil_error
            done += 1
        for _ in range(50):
            D = rng.choice(fields)
            radius = Fraction(rng.randint(2, 40), rng.randint(1, 4))
            got = {(a.x, a.y) for a in enumerate_tp_integers(QuadField(D), radius)}
            assert got == _brute_enumerate(D, radius), (D, radius)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                pass
