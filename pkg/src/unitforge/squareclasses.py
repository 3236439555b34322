"""Square classes in multiquadratic composita and certificates of distinct unit classes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, count
from typing import Iterable, Iterator, Optional, Sequence

from .arith import (
    SquareClassVector,
    factorize,
    gf2_express,
    gf2_rank,
    is_perfect_square,
    squarefree_part,
)
from .biquadratic import (
    BiquadElem,
    BiquadField,
    cor63_test,
    prop65_admissible,
    prop65_discriminants,
    prop65_mu,
    rel_norm,
)
from .errors import BadPrime, InsufficientFamilies, VerificationError
from .multiquad import MultiquadField
from .quadratic import QuadElem, QuadField, delta, quad_sqrt

FAMILIES = ("Example53", "Example54", "Prop65Family", "AllSquareFree")


@dataclass(frozen=True)
class MultiquadDescriptor:
    """Q(sqrt g : g in generators), or a named family cut to ``prefix`` members."""

    generators: tuple[int, ...] = ()
    family: Optional[str] = None
    prefix: int = 0

    def __post_init__(self) -> None:
        if self.family is not None and self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family is None:
            gens = tuple(self.generators)
            for g in gens:
                if g < 2 or squarefree_part(g).s != g:
                    raise ValueError(f"generator {g} is not a squarefree integer >= 2")
            if len(set(gens)) != len(gens):
                raise ValueError("generators must be pairwise distinct")
            object.__setattr__(self, "generators", gens)

    @property
    def all_squarefree(self) -> bool:
        return self.family == "AllSquareFree"

    def materialize(self) -> tuple[int, ...]:
        if self.family is None:
            return self.generators
        if self.family == "Example53":
            return tuple(squarefree_part(4 * n * n - 1).s for n in example53_sequence(self.prefix))
        if self.family == "Example54":
            qs = primes_3_mod_4(2 * self.prefix)
            return tuple(qs[2 * i] * qs[2 * i + 1] for i in range(self.prefix))
        if self.family == "Prop65Family":
            gens = []
            for n in admissible_prop65(self.prefix):
                d1, d2, _ = prop65_discriminants(n)
                gens += [d1, d2]
            return tuple(gens)
        # AllSquareFree: the first ``prefix`` squarefree integers >= 2
        out, k = [], 2
        while len(out) < self.prefix:
            if squarefree_part(k).s == k:
                out.append(k)
            k += 1
        return tuple(out)


def is_square_in(d: int | Fraction, desc: MultiquadDescriptor) -> bool:
    """Kummer test: d is a square in Q(sqrt S) iff its class lies in the span of S."""
    d = Fraction(d)
    if d == 0:
        raise ValueError("d must be nonzero")
    if desc.all_squarefree:
        return d > 0
    target = SquareClassVector.of(d)
    basis = [SquareClassVector.of(g) for g in desc.materialize()]
    return gf2_express(target, basis) is not None


def example53_sequence(m: int) -> list[int]:
    """n_0 = 1; n_k = least multiple of prod_{l<k}(4 n_l^2 - 1) with 2 n_k + 1 non-square."""
    ns: list[int] = []
    for k in range(m):
        if k == 0:
            ns.append(1)
            continue
        step = math.prod(4 * n * n - 1 for n in ns)
        j = 1
        while is_perfect_square(2 * step * j + 1):
            j += 1
        ns.append(step * j)
    return ns


@dataclass
class Example53Entry:
    n: int
    field: QuadField
    eps: QuadElem
    square_class: int  # 2(2n+1)

    def to_json(self) -> dict:
        return {"n": self.n, "D": self.field.D, "eps": str(self.eps), "class": self.square_class}


def example53_family(m: int) -> list[Example53Entry]:
    if m < 1:
        raise ValueError("m must be >= 1")
    entries = []
    for n in example53_sequence(m):
        sf = squarefree_part(4 * n * n - 1)
        K = QuadField(sf.s)
        eps = QuadElem(K, 2 * n, sf.r)
        cls = 2 * (2 * n + 1)
        if not (eps.is_unit() and eps.is_totally_positive()):
            raise VerificationError(f"eps = {eps} is not a totally positive unit")
        if is_perfect_square(2 * n + 1):
            raise VerificationError(f"2n+1 is a square for n = {n}")
        if quad_sqrt(eps * cls) is None:
            raise VerificationError(f"eps * {cls} is not a square in {K}")
        entries.append(Example53Entry(n, K, eps, cls))
    for a, b in combinations(entries, 2):
        if math.gcd(4 * a.n**2 - 1, 4 * b.n**2 - 1) != 1:
            raise VerificationError(f"4n^2-1 not coprime for n = {a.n}, {b.n}")
    return entries


def example53_nonsquare_checks(entries: Sequence[Example53Entry]) -> dict[str, bool]:
    """The classes 2(2n_k+1) and (2n_k+1)(2n_l+1) are non-squares in the compositum."""
    desc = MultiquadDescriptor(tuple(sorted({e.field.D for e in entries})))
    checks = {}
    for e in entries:
        checks[f"2(2n+1) n={e.n}"] = not is_square_in(e.square_class, desc)
    for a, b in combinations(entries, 2):
        checks[f"(2n+1)(2m+1) n={a.n},m={b.n}"] = not is_square_in((2 * a.n + 1) * (2 * b.n + 1), desc)
    return checks


def primes_3_mod_4(count_: int) -> list[int]:
    out, p = [], 3
    while len(out) < count_:
        if p % 4 == 3 and all(p % q for q in range(3, math.isqrt(p) + 1, 2)):
            out.append(p)
        p += 2
    return out


@dataclass
class Example54Entry:
    primes: tuple[int, int]
    field: QuadField
    delta: int

    def to_json(self) -> dict:
        return {"primes": list(self.primes), "D": self.field.D, "delta": self.delta}


def example54_family(primes: Sequence[int]) -> list[Example54Entry]:
    primes = list(primes)
    if len(primes) % 2:
        raise BadPrime("need an even number of primes")
    if len(set(primes)) != len(primes):
        raise BadPrime("primes must be distinct")
    for q in primes:
        if q % 4 != 3 or factorize(q) != {q: 1}:
            raise BadPrime(f"{q} is not a prime congruent to 3 mod 4")
    entries = []
    for i in range(len(primes) // 2):
        q0, q1 = primes[2 * i], primes[2 * i + 1]
        K = QuadField(q0 * q1)
        d = delta(K)
        if d not in (q0, q1):
            raise VerificationError(f"delta = {d} of {K} is neither {q0} nor {q1}")
        entries.append(Example54Entry((q0, q1), K, d))
    desc = MultiquadDescriptor(tuple(e.field.D for e in entries))
    for e in entries:
        if is_square_in(e.delta, desc):
            raise VerificationError(f"delta = {e.delta} is a square in the compositum")
    for a, b in combinations(entries, 2):
        if is_square_in(a.delta * b.delta, desc):
            raise VerificationError(f"delta product {a.delta * b.delta} is a square in the compositum")
    return entries


# --- certificates of distinct totally positive unit classes -------------------


@dataclass(frozen=True)
class FamilyEntry:
    """A biquadratic field with a totally positive unit alpha outside K^2 Q^x,
    and the index i' of a subfield where N_{K/K_i'}(alpha) is a non-square."""

    alpha: BiquadElem
    sub_index: int

    @property
    def field(self) -> BiquadField:
        return self.alpha.field


def _field_json(F: BiquadField) -> dict:
    return {"d1": F.d1, "d2": F.d2}


def _class_span(gens: Sequence[int]) -> list[int]:
    out = []
    for k in range(len(gens) + 1):
        for combo in combinations(gens, k):
            out.append(squarefree_part(math.prod(combo)).s)
    return out


def kummer_nonsquare(N: QuadElem, other_generators: Sequence[int]) -> bool:
    """N (in K' = Q(sqrt D')) stays a non-square in K'(sqrt a : a in other_generators).

    By Kummer theory over K' it is a square there iff N*c is a square in K'
    for some c in the multiplicative span of the generators.
    """
    return all(quad_sqrt(N * c) is None for c in _class_span(other_generators))


def _disjoint(F: BiquadField, G: BiquadField) -> bool:
    vecs = [SquareClassVector.of(d) for d in (F.d1, F.d2, G.d1, G.d2)]
    return gf2_rank(vecs) == 4


def norm_identity_holds(a: FamilyEntry, b: FamilyEntry) -> bool:
    """N_{K_a K_b / K_a' K_b}(alpha_a alpha_b) == N_{K_a/K_a'}(alpha_a) * alpha_b^2, computed
    in the degree-16 compositum."""
    Fa, Fb = a.field, b.field
    L = MultiquadField([Fa.d1, Fa.d2, Fb.d1, Fb.d2])
    fixed = [Fa.radicands[a.sub_index - 1], Fb.d1, Fb.d2]
    taus = [s for s in L.fixing(fixed) if any(x < 0 for x in s)]
    if len(taus) != 1:
        raise VerificationError("relative Galois group is not of order 2")
    tau = taus[0]

    def lift(e: BiquadElem):
        F = e.field
        return L.elem(dict(zip((1, F.d1, F.d2, F.d3), e.coords)))

    prod = lift(a.alpha) * lift(b.alpha)
    lhs = prod * L.apply(tau, prod)
    N = rel_norm(a.alpha, a.sub_index)
    rhs = L.elem({1: N.x, N.D: N.y}) * lift(b.alpha) * lift(b.alpha)
    return lhs == rhs


def _admissible(entry: FamilyEntry) -> bool:
    a = entry.alpha
    if not (a.is_unit() and a.is_totally_positive()):
        return False
    if cor63_test(a).in_Q_square_class:
        return False
    return quad_sqrt(rel_norm(a, entry.sub_index)) is None


@dataclass
class ClassCertificate:
    units: list[FamilyEntry]
    witnesses: list[dict] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.units)

    def to_json(self) -> dict:
        return {
            "units": [
                {"field": _field_json(u.field), "elem": [str(c) for c in u.alpha.coords], "subfield": u.sub_index}
                for u in self.units
            ],
            "witnesses": self.witnesses,
        }


def _unit_witness(i: int, u: FamilyEntry) -> dict:
    N = rel_norm(u.alpha, u.sub_index)
    return {"pair": [i, i], "kind": "relnorm-nonsquare", "data": {"norm": N.to_json()}}


def _pair_witness(i: int, j: int, a: FamilyEntry, b: FamilyEntry) -> dict:
    N = rel_norm(a.alpha, a.sub_index)
    return {
        "pair": [i, j],
        "kind": "kummer",
        "data": {
            "norm": N.to_json(),
            "other_generators": [b.field.d1, b.field.d2],
            "classes_checked": _class_span([b.field.d1, b.field.d2]),
            "norm_identity": norm_identity_holds(a, b),
        },
    }


def greedy_disjoint_select(families: Iterable[FamilyEntry], m: int) -> ClassCertificate:
    """Pick m entries whose units are pairwise in distinct classes modulo K^2 Q^x."""
    if m < 1:
        raise ValueError("m must be >= 1")
    chosen: list[FamilyEntry] = []
    seen = 0
    for entry in families:
        seen += 1
        if not _admissible(entry):
            continue
        ok = True
        for prev in chosen:
            if not _disjoint(prev.field, entry.field):
                ok = False
                break
            N = rel_norm(prev.alpha, prev.sub_index)
            if not kummer_nonsquare(N, [entry.field.d1, entry.field.d2]):
                ok = False
                break
        if ok:
            chosen.append(entry)
            if len(chosen) == m:
                break
    if len(chosen) < m:
        raise InsufficientFamilies(f"only {len(chosen)} of {m} units selectable from {seen} families")
    cert = ClassCertificate(chosen)
    for i, u in enumerate(chosen):
        cert.witnesses.append(_unit_witness(i, u))
    for i, j in combinations(range(len(chosen)), 2):
        cert.witnesses.append(_pair_witness(i, j, chosen[i], chosen[j]))
    if not verify_certificate(cert.to_json()):
        raise VerificationError("freshly built certificate does not verify")
    return cert


def admissible_prop65(count_: int, limit: int = 10**6) -> list[int]:
    out = []
    for n in range(1, limit, 12):
        if len(out) >= count_:
            break
        if prop65_admissible(n):
            out.append(n)
    return out


def prop65_entries(limit: int = 10**6) -> Iterator[FamilyEntry]:
    for n in range(1, limit, 12):
        if prop65_admissible(n):
            yield FamilyEntry(prop65_mu(n), 2)


def theorem72_certificate(m: int) -> ClassCertificate:
    """m certified distinct totally positive unit classes inside Q^(2), from the
    biquadratic family mu(n), n = 1 mod 12."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return greedy_disjoint_select(prop65_entries(), m)


def verify_certificate(doc: dict) -> bool:
    """Re-check a serialized certificate using only its own contents."""
    try:
        units = []
        for u in doc["units"]:
            F = BiquadField(int(u["field"]["d1"]), int(u["field"]["d2"]))
            units.append(FamilyEntry(BiquadElem(F, [Fraction(c) for c in u["elem"]]), int(u["subfield"])))
        for u in units:
            if not (u.alpha.is_unit() and u.alpha.is_totally_positive()):
                return False
        covered_units, covered_pairs = set(), set()
        for w in doc["witnesses"]:
            i, j = w["pair"]
            a = units[i]
            N = rel_norm(a.alpha, a.sub_index)
            if QuadElem.from_json(w["data"]["norm"]) != N:
                return False
            if w["kind"] == "relnorm-nonsquare":
                if i != j or quad_sqrt(N) is not None:
                    return False
                covered_units.add(i)
            elif w["kind"] == "kummer":
                b = units[j]
                gens = [b.field.d1, b.field.d2]
                if list(w["data"]["other_generators"]) != gens:
                    return False
                if not _disjoint(a.field, b.field) or not kummer_nonsquare(N, gens):
                    return False
                if not norm_identity_holds(a, b):
                    return False
                covered_pairs.add((i, j))
            else:
                return False
        n = len(units)
        return covered_units == set(range(n)) and covered_pairs == set(combinations(range(n), 2))
    except (KeyError, ValueError, IndexError, TypeError):
        return False
