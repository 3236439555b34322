"""Biquadratic fields Q(sqrt d1, sqrt d2) over the basis (1, sqrt d1, sqrt d2, sqrt d3)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arith import squarefree_part
from .errors import (
    BadResidue,
    CoercionFailure,
    NotSquareFree,
    PreconditionUnverifiable,
    VerificationError,
)
from .exactreal import ExactReal, scale_interval, sqrt_enclosure
from .quadratic import QuadElem, QuadField, pell_report, quad_sqrt

# sign pattern of sigma_i on the basis (1, sqrt d1, sqrt d2, sqrt d3)
_SIGMA = {
    0: (1, 1, 1, 1),
    1: (1, 1, -1, -1),
    2: (1, -1, 1, -1),
    3: (1, -1, -1, 1),
}


@dataclass(frozen=True)
class BiquadField:
    d1: int
    d2: int
    d3: int = field(init=False)
    g12: int = field(init=False)
    g13: int = field(init=False)
    g23: int = field(init=False)

    def __post_init__(self) -> None:
        for name, d in (("d1", self.d1), ("d2", self.d2)):
            if d < 2 or squarefree_part(d).s != d:
                raise ValueError(f"{name} = {d} must be a squarefree integer > 1")
        if self.d1 == self.d2:
            raise ValueError("d1 and d2 must differ")
        g = math.gcd(self.d1, self.d2)
        object.__setattr__(self, "g12", g)
        object.__setattr__(self, "d3", self.d1 * self.d2 // (g * g))
        object.__setattr__(self, "g13", self.d1 // g)
        object.__setattr__(self, "g23", self.d2 // g)

    @property
    def radicands(self) -> tuple[int, int, int]:
        return self.d1, self.d2, self.d3

    def subfield(self, i: int) -> QuadField:
        return QuadField(self.radicands[i - 1])

    def subfield_index(self, D: int) -> int:
        try:
            return self.radicands.index(D) + 1
        except ValueError:
            raise ValueError(f"Q(sqrt {D}) is not a subfield of {self}") from None

    def _table(self) -> list[list[tuple[int, int]]]:
        # basis index i <-> exponent bits; e_i * e_j = c * e_(i ^ j)
        d1, d2, d3 = self.radicands
        sq = (1, d1, d2, d3)
        c = {(1, 2): self.g12, (1, 3): self.g13, (2, 3): self.g23}
        t = [[(0, 0)] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(4):
                if i == 0 or j == 0:
                    coef = 1
                elif i == j:
                    coef = sq[i]
                else:
                    coef = c[(min(i, j), max(i, j))]
                t[i][j] = (i ^ j, coef)
        return t

    def __call__(self, *coords) -> "BiquadElem":
        return BiquadElem(self, coords)

    def zero(self) -> "BiquadElem":
        return BiquadElem(self, (0, 0, 0, 0))

    def one(self) -> "BiquadElem":
        return BiquadElem(self, (1, 0, 0, 0))

    def gen(self, i: int) -> "BiquadElem":
        coords = [0, 0, 0, 0]
        coords[i] = 1
        return BiquadElem(self, coords)

    def embed(self, q: QuadElem) -> "BiquadElem":
        i = self.subfield_index(q.D)
        coords = [q.x, 0, 0, 0]
        coords[i] = q.y
        return BiquadElem(self, coords)

    def coerce(self, v) -> "BiquadElem":
        if isinstance(v, BiquadElem):
            if v.field != self:
                raise ValueError("element belongs to a different biquadratic field")
            return v
        if isinstance(v, QuadElem):
            return self.embed(v)
        return BiquadElem(self, (Fraction(v), 0, 0, 0))

    def is_integral(self, e) -> bool:
        return self.coerce(e).is_integer()

    def is_totally_positive(self, e) -> bool:
        return self.coerce(e).is_totally_positive()

    def is_unit(self, e) -> bool:
        return self.coerce(e).is_unit()

    def conjugates(self, e) -> list["BiquadElem"]:
        e = self.coerce(e)
        return [e.sigma(i) for i in range(4)]

    def __str__(self) -> str:
        return f"Q(sqrt({self.d1}), sqrt({self.d2}))"


_TABLES: dict[BiquadField, list] = {}


def _table(F: BiquadField):
    t = _TABLES.get(F)
    if t is None:
        t = _TABLES[F] = F._table()
    return t


class BiquadElem:
    __slots__ = ("field", "coords")

    def __init__(self, field: BiquadField, coords: Sequence) -> None:
        if len(coords) != 4:
            raise ValueError("need four coordinates")
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)

    def _lift(self, other) -> Optional["BiquadElem"]:
        if isinstance(other, BiquadElem):
            if other.field != self.field:
                raise ValueError("mixing different biquadratic fields")
            return other
        if isinstance(other, (int, Fraction, QuadElem)):
            return self.field.coerce(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return BiquadElem(self.field, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self) -> "BiquadElem":
        return BiquadElem(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return BiquadElem(self.field, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        t = _table(self.field)
        out = [Fraction(0)] * 4
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(o.coords):
                if b:
                    k, c = t[i][j]
                    out[k] += c * a * b
        return BiquadElem(self.field, out)

    __rmul__ = __mul__

    def sigma(self, i: int) -> "BiquadElem":
        """sigma_i fixes sqrt(d_i) and negates the other two radicals; sigma_0 = id."""
        return BiquadElem(self.field, [s * a for s, a in zip(_SIGMA[i], self.coords)])

    def norm(self) -> Fraction:
        p = self * self.sigma(1) * self.sigma(2) * self.sigma(3)
        if any(p.coords[1:]):
            raise VerificationError("absolute norm is not rational")
        return p.coords[0]

    def inverse(self) -> "BiquadElem":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        rest = self.sigma(1) * self.sigma(2) * self.sigma(3)
        return rest * (1 / (self * rest).coords[0])

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> "BiquadElem":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            o = self._lift(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self) -> int:
        if not any(self.coords[1:]):
            return hash(self.coords[0])
        return hash((self.field, self.coords))

    def __bool__(self) -> bool:
        return any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def regular_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self; column j is self * e_j."""
        cols = [(self * self.field.gen(j)).coords for j in range(4)]
        return [[cols[j][i] for j in range(4)] for i in range(4)]

    def charpoly(self) -> list[Fraction]:
        """Coefficients [1, c1, c2, c3, c4] of det(X - M) by Faddeev-LeVerrier."""
        M = self.regular_matrix()
        n = 4
        coeffs = [Fraction(1)]
        Mk = [[Fraction(0)] * n for _ in range(n)]
        for k in range(1, n + 1):
            # Mk = M * (M_{k-1} + c_{k-1} I)
            prev = [row[:] for row in Mk]
            for i in range(n):
                prev[i][i] += coeffs[-1]
            Mk = [[sum(M[i][l] * prev[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
            coeffs.append(-sum(Mk[i][i] for i in range(n)) / k)
        return coeffs

    def is_integer(self) -> bool:
        return all(c.denominator == 1 for c in self.charpoly())

    def is_unit(self) -> bool:
        cp = self.charpoly()
        return all(c.denominator == 1 for c in cp) and abs(cp[-1]) == 1

    def enclosure(self, bits: int = 60) -> tuple[Fraction, Fraction]:
        lo = hi = self.coords[0]
        for c, d in zip(self.coords[1:], self.field.radicands):
            if c:
                a, b = scale_interval(c, *sqrt_enclosure(d, bits))
                lo += a
                hi += b
        return lo, hi

    def sign(self) -> int:
        """Exact sign under the identity embedding: zero test, then refine intervals."""
        if not self:
            return 0
        bits = 32
        while True:
            lo, hi = self.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def embedding_signs(self) -> tuple[int, int, int, int]:
        return tuple(self.sigma(i).sign() for i in range(4))

    def is_totally_positive(self) -> bool:
        return self.embedding_signs() == (1, 1, 1, 1)

    def is_totally_negative(self) -> bool:
        return self.embedding_signs() == (-1, -1, -1, -1)

    def house(self) -> ExactReal:
        best = None
        for i in range(4):
            c = self.sigma(i)
            if c.sign() < 0:
                c = -c
            if best is None or (c - best).sign() > 0:
                best = c
        return ExactReal(best)

    def __float__(self) -> float:
        lo, hi = self.enclosure(60)
        return float((lo + hi) / 2)

    def __str__(self) -> str:
        d1, d2, d3 = self.field.radicands
        x0, x1, x2, x3 = self.coords
        return f"{x0} + {x1}*sqrt({d1}) + {x2}*sqrt({d2}) + {x3}*sqrt({d3})"

    def __repr__(self) -> str:
        return f"BiquadElem({self})"

    def to_json(self) -> dict:
        return {"d1": self.field.d1, "d2": self.field.d2, "coords": [str(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict) -> "BiquadElem":
        return cls(BiquadField(int(data["d1"]), int(data["d2"])), [Fraction(c) for c in data["coords"]])


def nested_sign(e: BiquadElem) -> int:
    """Exact sign by writing e = P + Q sqrt(d2) with P, Q in Q(sqrt d1).

    Independent of the interval route; used as a cross-check.
    """
    F = e.field
    K1 = QuadField(F.d1)
    x0, x1, x2, x3 = e.coords
    P = QuadElem(K1, x0, x1)
    Q = QuadElem(K1, x2, x3 / F.g12)
    sP, sQ = P.sign(), Q.sign()
    if sQ == 0:
        return sP
    if sP == 0 or sP == sQ:
        return sQ
    return sP if (P * P - Q * Q * F.d2).sign() > 0 else sQ


def galois_sigma(i: int):
    """The automorphism sigma_i as a callable."""
    if i not in (0, 1, 2, 3):
        raise ValueError("sigma index must be 0..3")
    return lambda e: e.sigma(i)


def rel_norm(e: BiquadElem, i: int) -> QuadElem:
    """Norm from K down to its quadratic subfield K_i, as an element of Q(sqrt d_i)."""
    p = e * e.sigma(i)
    off = [c for k, c in enumerate(p.coords) if k not in (0, i)]
    if any(off):
        raise CoercionFailure(f"N_{{K/K_{i}}}({e}) has coordinates outside K_{i}")
    return QuadElem(e.field.subfield(i), p.coords[0], p.coords[i])


def mul(a: BiquadElem, b: BiquadElem) -> BiquadElem:
    return a * b


def inverse(a: BiquadElem) -> BiquadElem:
    return a.inverse()


def is_totally_positive(e: BiquadElem) -> bool:
    return e.is_totally_positive()


def is_unit(e: BiquadElem) -> bool:
    return e.is_unit()


def biquad_sqrt(e: BiquadElem) -> Optional[BiquadElem]:
    """A square root of e inside K, or None.

    For each subfield K_i: if n = sqrt(N_i(e)) exists in K_i, then
    t^2 = e + sigma_i(e) + 2n; when t lies in K_i, s = (e + n)/t.
    If s exists, some i gives t != 0, so rotating over i is complete.
    """
    F = e.field
    if not e:
        return F.zero()
    for i in (1, 2, 3):
        r = quad_sqrt(rel_norm(e, i))
        if r is None:
            continue
        for n in (r, -r):
            nb = F.embed(n)
            t2 = e + e.sigma(i) + 2 * nb
            if not t2:
                continue
            if any(c for k, c in enumerate(t2.coords) if k not in (0, i)):
                continue
            t = quad_sqrt(QuadElem(F.subfield(i), t2.coords[0], t2.coords[i]))
            if t is None:
                continue
            s = (e + nb) / F.embed(t)
            if s * s == e:
                return s if s.sign() > 0 else -s
    return None


def prop61_identity_check(e: BiquadElem) -> bool:
    """mu^2 == N_{K/Q}(mu)^-1 * prod_i N_{K/K_i}(mu), checked exactly."""
    if not e:
        raise ValueError("identity needs a nonzero element")
    F = e.field
    prod = F.one()
    for i in (1, 2, 3):
        prod = prod * F.embed(rel_norm(e, i))
    return e * e == prod / e.norm()


@dataclass
class Cor63Result:
    norms_square: tuple[bool, bool, bool]
    in_Q_square_class: bool
    decomposition: Optional[tuple[QuadElem, QuadElem, QuadElem]]

    def to_json(self) -> dict:
        return {
            "norms_square": list(self.norms_square),
            "in_Q_square_class": self.in_Q_square_class,
            "decomposition": None
            if self.decomposition is None
            else [q.to_json() for q in self.decomposition],
        }


def has_tp_nonsquare_subfield(F: BiquadField) -> bool:
    return any(pell_report(d).tp_unit_exists for d in F.radicands)


def cor63_test(alpha: BiquadElem) -> Cor63Result:
    """Decide alpha in K^2 Q^x via the three relative norms."""
    F = alpha.field
    if not alpha.is_unit():
        raise ValueError(f"{alpha} is not a unit")
    if alpha.is_totally_negative():
        raise ValueError(f"{alpha} is totally negative")
    if not has_tp_nonsquare_subfield(F):
        raise PreconditionUnverifiable(f"no quadratic subfield of {F} has a totally positive non-square unit")
    roots = [quad_sqrt(rel_norm(alpha, i)) for i in (1, 2, 3)]
    flags = tuple(r is not None for r in roots)
    if not all(flags):
        return Cor63Result(flags, False, None)
    eps = []
    for r in roots:
        if not r.is_totally_positive() and (-r).is_totally_positive():
            r = -r
        eps.append(r)
    prod = F.embed(eps[0]) * F.embed(eps[1]) * F.embed(eps[2])
    if prod == -alpha:
        eps[0] = -eps[0]
        prod = -prod
    if prod != alpha:
        raise VerificationError(f"alpha != eps1*eps2*eps3 for {alpha}")
    return Cor63Result(flags, True, tuple(eps))


@dataclass
class Prop65Result:
    n: int
    field: BiquadField
    mu: BiquadElem
    rel_norms: tuple[QuadElem, QuadElem, QuadElem]
    checks: dict[str, bool]

    @property
    def all_passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "field": {"d1": self.field.d1, "d2": self.field.d2, "d3": self.field.d3},
            "mu": str(self.mu),
            "rel_norms": [str(q) for q in self.rel_norms],
            "checks": self.checks,
            "all_passed": self.all_passed,
        }


def prop65_discriminants(n: int) -> tuple[int, int, int]:
    return n * (n + 1), 3 * n * (3 * n + 4), (3 * n + 3) * (3 * n + 4)


def prop65_admissible(n: int) -> bool:
    if n < 1 or n % 12 != 1:
        return False
    return all(squarefree_part(d).s == d for d in prop65_discriminants(n))


def prop65_mu(n: int) -> BiquadElem:
    d1, d2, d3 = prop65_discriminants(n)
    F = BiquadField(d1, d2)
    if F.d3 != d3:
        raise VerificationError(f"d3 mismatch for n = {n}")
    return F(Fraction(3 * n + 4, 2), Fraction(3, 2), Fraction(1, 2), Fraction(1, 2))


def prop65_family(n: int) -> Prop65Result:
    if n % 12 != 1:
        raise BadResidue(f"n = {n} is not 1 mod 12")
    for name, d in zip(("d1", "d2", "d3"), prop65_discriminants(n)):
        if squarefree_part(d).s != d:
            raise NotSquareFree(name, d)
    mu = prop65_mu(n)
    F = mu.field
    K2, K3 = F.subfield(2), F.subfield(3)
    norms = tuple(rel_norm(mu, i) for i in (1, 2, 3))
    checks = {
        "norm1_is_1": norms[0] == 1,
        "norm2_formula": norms[1] == QuadElem(K2, Fraction(3 * n + 2, 2), Fraction(1, 2)),
        "norm3_formula": norms[2] == QuadElem(K3, 6 * n + 7, 2),
        "totally_positive": mu.is_totally_positive(),
        "unit": mu.is_unit(),
    }
    checks["not_in_Q_square_class"] = not cor63_test(mu).in_Q_square_class
    return Prop65Result(n, F, mu, norms, checks)
