"""Real quadratic fields Q(sqrt D): exact elements, units, and the delta invariant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import NamedTuple, Optional, Union

from .arith import (
    cf_sqrt,
    factorize,
    gf2_rank,
    rational_sqrt,
    squarefree_part,
    SquareClassVector,
)
from .errors import DegenerateBeta, NormMinusOne, VerificationError
from .exactreal import ExactReal, scale_interval, sqrt_enclosure

Rational = Union[int, Fraction]


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


@dataclass(frozen=True)
class QuadField:
    D: int

    def __post_init__(self) -> None:
        if self.D < 2 or squarefree_part(self.D).s != self.D:
            raise ValueError(f"D = {self.D} must be a squarefree integer >= 2")

    @property
    def disc(self) -> int:
        return self.D if self.D % 4 == 1 else 4 * self.D

    def __call__(self, x: Rational = 0, y: Rational = 0) -> "QuadElem":
        return QuadElem(self, x, y)

    @property
    def sqrt(self) -> "QuadElem":
        return QuadElem(self, 0, 1)

    def zero(self) -> "QuadElem":
        return QuadElem(self, 0, 0)

    def one(self) -> "QuadElem":
        return QuadElem(self, 1, 0)

    def coerce(self, v) -> "QuadElem":
        if isinstance(v, QuadElem):
            if v.field != self:
                raise ValueError(f"element of Q(sqrt {v.field.D}) is not in Q(sqrt {self.D})")
            return v
        return QuadElem(self, Fraction(v), 0)

    # uniform base-field interface used by the lattice code
    def is_integral(self, e) -> bool:
        return self.coerce(e).is_integer()

    def is_totally_positive(self, e) -> bool:
        return self.coerce(e).is_totally_positive()

    def is_unit(self, e) -> bool:
        return self.coerce(e).is_unit()

    def conjugates(self, e) -> list["QuadElem"]:
        e = self.coerce(e)
        return [e, e.conjugate()]

    def __str__(self) -> str:
        return f"Q(sqrt({self.D}))"


@total_ordering
class QuadElem:
    """x + y*sqrt(D) with rational x, y; ordering is by the real value."""

    __slots__ = ("field", "x", "y")

    def __init__(self, field: QuadField, x: Rational = 0, y: Rational = 0) -> None:
        self.field = field
        self.x = Fraction(x)
        self.y = Fraction(y)

    @property
    def D(self) -> int:
        return self.field.D

    def _lift(self, other) -> Optional["QuadElem"]:
        if isinstance(other, QuadElem):
            if other.field != self.field:
                raise ValueError(f"mixing Q(sqrt {self.D}) and Q(sqrt {other.D})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self) -> "QuadElem":
        return QuadElem(self.field, -self.x, -self.y)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.field, self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadElem(
            self.field,
            self.x * o.x + self.D * self.y * o.y,
            self.x * o.y + self.y * o.x,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElem(self.field, self.x / n, -self.y / n)

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

    def __pow__(self, k: int) -> "QuadElem":
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
        return self.x == o.x and self.y == o.y

    def __lt__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.y == 0:
            return hash(self.x)
        return hash((self.D, self.x, self.y))

    def __bool__(self) -> bool:
        return bool(self.x) or bool(self.y)

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.field, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.D * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def is_rational(self) -> bool:
        return self.y == 0

    def is_integer(self) -> bool:
        # integral iff the characteristic polynomial X^2 - tX + n is in Z[X]
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def is_unit(self) -> bool:
        return self.is_integer() and abs(self.norm()) == 1

    def sign(self) -> int:
        """Exact sign of x + y*sqrt(D) as a real number."""
        sx, sy = _sign(self.x), _sign(self.y)
        if sy == 0:
            return sx
        if sx == 0 or sx == sy:
            return sy
        return sx if self.x * self.x > self.D * self.y * self.y else sy

    def signs(self) -> tuple[int, int]:
        return self.sign(), self.conjugate().sign()

    def is_totally_positive(self) -> bool:
        return self.signs() == (1, 1)

    def abs(self) -> "QuadElem":
        return -self if self.sign() < 0 else self

    def house(self) -> ExactReal:
        """max(|x + y sqrt D|, |x - y sqrt D|) = |x| + |y| sqrt D."""
        return ExactReal(QuadElem(self.field, abs(self.x), abs(self.y)))

    def enclosure(self, bits: int = 60) -> tuple[Fraction, Fraction]:
        lo, hi = sqrt_enclosure(self.D, bits)
        a, b = scale_interval(self.y, lo, hi)
        return self.x + a, self.x + b

    def __float__(self) -> float:
        lo, hi = self.enclosure(60)
        return float((lo + hi) / 2)

    def __str__(self) -> str:
        return f"{self.x} + {self.y}*sqrt({self.D})"

    def __repr__(self) -> str:
        return f"QuadElem({self})"

    def to_json(self) -> dict:
        return {"D": self.D, "x": str(self.x), "y": str(self.y)}

    @classmethod
    def from_json(cls, data: dict) -> "QuadElem":
        return cls(QuadField(int(data["D"])), Fraction(data["x"]), Fraction(data["y"]))


def conjugate(e: QuadElem) -> QuadElem:
    return e.conjugate()


def norm(e: QuadElem) -> Fraction:
    return e.norm()


def trace(e: QuadElem) -> Fraction:
    return e.trace()


def is_integer(e: QuadElem) -> bool:
    return e.is_integer()


def is_totally_positive(e: QuadElem) -> bool:
    return e.is_totally_positive()


def house(e: QuadElem) -> ExactReal:
    return e.house()


def _ladder_unit(D: int) -> tuple[int, int, int]:
    """First convergent (p, q) of sqrt(D) with p^2 - D q^2 in {+-1, +-4}.

    Returns (p, q, denominator) so the unit is (p + q sqrt D) / denominator.
    A solution of |X^2 - D Y^2| = 4 with odd X, Y is coprime, so once
    sqrt(D) > 4 it must appear among the convergents.
    """
    half_ok = D % 4 == 1
    for p, q in cf_sqrt(D).convergents():
        n = p * p - D * q * q
        if n in (1, -1):
            return p, q, 1
        if half_ok and n in (4, -4) and p % 2 == 1 and q % 2 == 1:
            return p, q, 2
    raise AssertionError("unreachable")


def _small_half_unit(D: int, q_limit: int) -> Optional[tuple[int, int]]:
    # X^2 - D Y^2 = +-4 with odd X, Y below the ladder solution; only for D < 17
    for Y in range(1, 2 * q_limit + 1, 2):
        for n in (-4, 4):
            X2 = D * Y * Y + n
            if X2 > 0:
                X = math.isqrt(X2)
                if X * X == X2 and X % 2 == 1:
                    return X, Y
    return None


@lru_cache(maxsize=None)
def fundamental_unit(field: QuadField) -> QuadElem:
    """The unit eps > 1 generating O_K^x together with -1."""
    D = field.D
    p, q, den = _ladder_unit(D)
    if D % 4 == 1 and D < 17 and den == 1:
        small = _small_half_unit(D, q)
        if small is not None:
            p, q, den = small[0], small[1], 2
    eps = QuadElem(field, Fraction(p, den), Fraction(q, den))
    if not (eps.is_unit() and eps.sign() > 0 and eps > 1):
        raise VerificationError(f"bad fundamental unit {eps}")
    return eps


def delta(field: QuadField) -> int:
    """Squarefree delta with delta*eps a square in K; needs Norm(eps) = 1."""
    eps = fundamental_unit(field)
    if eps.norm() != 1:
        raise NormMinusOne(f"Norm(eps) = -1 for D = {field.D}; delta is undefined")
    t = (eps + 1).trace()
    d = squarefree_part(int(t)).s
    if quad_sqrt(eps * d) is None:
        raise VerificationError(f"delta*eps is not a square for D = {field.D}")
    if field.disc % d != 0 or d in (1, field.D, field.disc):
        raise VerificationError(f"delta = {d} violates divisibility for D = {field.D}")
    return d


def neg_pell_solvable(D: int) -> bool:
    """X^2 - D Y^2 = -1 is solvable iff the period of sqrt(D) has odd length."""
    return len(cf_sqrt(D).period) % 2 == 1


def has_prime_3_mod_4(D: int) -> bool:
    return any(p % 4 == 3 for p in factorize(D))


class PellReport(NamedTuple):
    tp_unit_exists: bool
    norm_eps: int
    neg_pell_solvable: bool
    has_p3mod4_divisor: bool

    def consistent(self) -> bool:
        ok = self.tp_unit_exists == (self.norm_eps == 1) == (not self.neg_pell_solvable)
        return ok and (not self.has_p3mod4_divisor or self.norm_eps == 1)


def pell_report(D: int) -> PellReport:
    eps = fundamental_unit(QuadField(D))
    return PellReport(
        tp_unit_exists=eps.is_totally_positive(),
        norm_eps=int(eps.norm()),
        neg_pell_solvable=neg_pell_solvable(D),
        has_p3mod4_divisor=has_prime_3_mod_4(D),
    )


def lemma51_witness(e: QuadElem) -> tuple[QuadElem, Fraction]:
    """For Norm(e) = 1 return (beta, t) with e * beta^2 = t = Tr(e + 1)."""
    if e.norm() != 1:
        raise ValueError(f"Norm({e}) = {e.norm()} != 1")
    beta = e.conjugate() + 1
    if not beta:
        raise DegenerateBeta("beta vanishes for e = -1")
    t = (e + 1).trace()
    if e * beta * beta != t:
        raise VerificationError(f"e*beta^2 != Tr(e+1) for e = {e}")
    return beta, t


def quad_sqrt(e: QuadElem) -> Optional[QuadElem]:
    """A square root of e in its field (positive under the identity embedding), or None."""
    F, a, b = e.field, e.x, e.y
    if not e:
        return F.zero()
    candidates = []
    if b == 0:
        r = rational_sqrt(a)
        if r is not None:
            candidates.append(QuadElem(F, r, 0))
        r = rational_sqrt(a / F.D)
        if r is not None:
            candidates.append(QuadElem(F, 0, r))
    else:
        n = rational_sqrt(e.norm())
        if n is not None:
            for m in (n, -n):
                x = rational_sqrt((a + m) / 2)
                if x:
                    candidates.append(QuadElem(F, x, b / (2 * x)))
    for s in candidates:
        if s * s == e:
            return s if s.sign() > 0 else -s
    return None


class SignatureRank(NamedTuple):
    rank: int
    quotient_size: int


def _sign_vector(e: QuadElem) -> SquareClassVector:
    # reuse the GF(2) machinery: embedding i with a negative sign -> "prime" i
    s1, s2 = e.signs()
    bits = frozenset(i for i, s in ((2, s1), (3, s2)) if s < 0)
    return SquareClassVector(bits)


def signature_rank(field: QuadField) -> SignatureRank:
    eps = fundamental_unit(field)
    minus_one = -field.one()
    rank = gf2_rank([_sign_vector(minus_one), _sign_vector(eps)])
    size = 2 ** (2 - rank)
    # units mod squares are {+-1, +-eps}; count the totally positive ones
    brute = sum(1 for u in (field.one(), minus_one, eps, -eps) if u.is_totally_positive())
    if brute != size:
        raise VerificationError(f"signature rank mismatch for D = {field.D}")
    return SignatureRank(rank, size)
