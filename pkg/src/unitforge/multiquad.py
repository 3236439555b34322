"""Arithmetic in a finite multiquadratic field Q(sqrt g1, ..., sqrt gk).

Elements are sums  sum_s c_s * sqrt(s)  over squarefree s in the span of
the generators. Only used to re-check certificate identities, so the
implementation favours clarity over speed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .arith import squarefree_part


class MultiquadField:
    def __init__(self, generators: Sequence[int]) -> None:
        gens = [squarefree_part(g).s for g in generators]
        bits_of: dict[int, int] = {}
        for mask in range(1 << len(gens)):
            s = 1
            for i, g in enumerate(gens):
                if mask >> i & 1:
                    s = _sqfree_mul(s, g)
            if s in bits_of:
                raise ValueError(f"generators {generators} are dependent modulo squares")
            bits_of[s] = mask
        self.generators = tuple(gens)
        self.bits_of = bits_of

    @property
    def degree(self) -> int:
        return len(self.bits_of)

    def elem(self, terms: Mapping[int, Fraction]) -> "MultiquadElem":
        for s in terms:
            if s not in self.bits_of:
                raise ValueError(f"sqrt({s}) is not in the field")
        return MultiquadElem(self, terms)

    def automorphisms(self):
        """Sign vectors on the generators, one per automorphism."""
        for signs in product((1, -1), repeat=len(self.generators)):
            yield signs

    def apply(self, signs: Sequence[int], e: "MultiquadElem") -> "MultiquadElem":
        out = {}
        for s, c in e.terms.items():
            mask = self.bits_of[s]
            sgn = math.prod(signs[i] for i in range(len(signs)) if mask >> i & 1)
            out[s] = sgn * c
        return MultiquadElem(self, out)

    def fixing(self, fixed: Iterable[int]) -> list[tuple[int, ...]]:
        """Sign vectors of the automorphisms fixing sqrt(d) for every d in ``fixed``."""
        fixed = [squarefree_part(d).s for d in fixed]
        result = []
        for signs in self.automorphisms():
            ok = True
            for d in fixed:
                mask = self.bits_of[d]
                if math.prod(signs[i] for i in range(len(signs)) if mask >> i & 1) != 1:
                    ok = False
                    break
            if ok:
                result.append(signs)
        return result


def _sqfree_mul(s: int, t: int) -> int:
    g = math.gcd(s, t)
    return (s // g) * (t // g)


class MultiquadElem:
    __slots__ = ("field", "terms")

    def __init__(self, field: MultiquadField, terms: Mapping[int, Fraction]) -> None:
        self.field = field
        self.terms = {s: Fraction(c) for s, c in terms.items() if c}

    def __add__(self, other: "MultiquadElem") -> "MultiquadElem":
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) + c
        return MultiquadElem(self.field, out)

    def __mul__(self, other) -> "MultiquadElem":
        if isinstance(other, (int, Fraction)):
            return MultiquadElem(self.field, {s: c * other for s, c in self.terms.items()})
        out: dict[int, Fraction] = {}
        for s, a in self.terms.items():
            for t, b in other.terms.items():
                g = math.gcd(s, t)
                u = (s // g) * (t // g)
                out[u] = out.get(u, 0) + a * b * g
        return MultiquadElem(self.field, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiquadElem) and self.terms == other.terms

    def __repr__(self) -> str:
        inner = " + ".join(f"{c}*sqrt({s})" for s, c in sorted(self.terms.items())) or "0"
        return f"MultiquadElem({inner})"
