"""Integer utilities: squarefree parts, continued fractions of sqrt(D), GF(2) square classes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

DEFAULT_TRIAL_BOUND = 10**6

# Miller-Rabin with these bases is deterministic below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981


class FactorizationIncomplete(ArithmeticError):
    """Raised when a cofactor can neither be split nor proven prime."""

    def __init__(self, n: int, cofactor: int) -> None:
        super().__init__(f"cannot factor {n}: residual cofactor {cofactor} is unresolved")
        self.n = n
        self.cofactor = cofactor


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_proven_prime(n: int) -> bool:
    """Deterministic primality; raises nothing, returns False when undecidable."""
    if n >= _MR_LIMIT:
        return False
    return is_probable_prime(n)


def factorize(n: int, bound: int = DEFAULT_TRIAL_BOUND) -> dict[int, int]:
    """Prime factorization of |n| by trial division up to ``bound``.

    The leftover cofactor must be 1, provably prime, or have no prime
    factor below ``bound`` while being smaller than ``bound**2`` (hence prime).
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    m = abs(n)
    factors: dict[int, int] = {}
    if m > 10**12 and is_proven_prime(m):
        return {m: 1}
    p = 2
    while p * p <= m and p <= bound:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
            if m > 1 and is_proven_prime(m):
                break
        p += 1 if p == 2 else 2
    if m > 1:
        if p * p > m or is_proven_prime(m):
            factors[m] = factors.get(m, 0) + 1
        else:
            raise FactorizationIncomplete(n, m)
    return factors


@dataclass(frozen=True)
class SquareFreeDecomp:
    s: int
    r: int


def squarefree_part(n: int, bound: int = DEFAULT_TRIAL_BOUND) -> SquareFreeDecomp:
    """Write n = s * r**2 with s squarefree and sign(s) == sign(n)."""
    if n == 0:
        raise ValueError("squarefree_part undefined for 0")
    s, r = 1, 1
    for p, e in factorize(n, bound).items():
        if e % 2:
            s *= p
        r *= p ** (e // 2)
    if n < 0:
        s = -s
    return SquareFreeDecomp(s, r)


def squarefree_kernel(q: int | Fraction) -> int:
    """Squarefree integer in the rational square class of q (q != 0)."""
    q = Fraction(q)
    return squarefree_part(q.numerator * q.denominator).s


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    return math.isqrt(n) ** 2 == n


def rational_sqrt(q: int | Fraction) -> Optional[Fraction]:
    """Nonnegative rational square root of q, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


@dataclass(frozen=True)
class CFExpansion:
    a0: int
    period: tuple[int, ...]

    def terms(self):
        """Infinite iterator over partial quotients a0, a1, a2, ..."""
        yield self.a0
        while True:
            yield from self.period

    def convergents(self):
        """Infinite iterator over convergents (p_k, q_k)."""
        p_prev, p = 0, 1
        q_prev, q = 1, 0
        for a in self.terms():
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            yield p, q


def cf_sqrt(D: int) -> CFExpansion:
    """Continued fraction of sqrt(D) with its minimal period.

    Uses the (P, Q) recurrence; the period closes when Q returns to 1.
    """
    if D < 2:
        raise ValueError("D must be >= 2")
    a0 = math.isqrt(D)
    if a0 * a0 == D:
        raise ValueError(f"{D} is a perfect square")
    P, Q, a = 0, 1, a0
    period = []
    while True:
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (a0 + P) // Q
        period.append(a)
        if Q == 1:
            break
    return CFExpansion(a0, tuple(period))


@dataclass(frozen=True)
class SquareClassVector:
    """A squarefree integer +/- prod(primes), viewed as a vector over GF(2)."""

    primes: frozenset
    sign_bit: bool = False

    @classmethod
    def of(cls, n: int | Fraction) -> "SquareClassVector":
        s = squarefree_kernel(n)
        return cls(frozenset(factorize(s)), s < 0)

    @property
    def value(self) -> int:
        v = math.prod(self.primes)
        return -v if self.sign_bit else v

    def __mul__(self, other: "SquareClassVector") -> "SquareClassVector":
        return SquareClassVector(self.primes ^ other.primes, self.sign_bit ^ other.sign_bit)

    def is_trivial(self) -> bool:
        return not self.primes and not self.sign_bit


def _to_bits(v: SquareClassVector, index: dict) -> int:
    bits = 1 if v.sign_bit else 0
    for p in v.primes:
        bits |= 1 << index[p]
    return bits


def gf2_express(
    target: SquareClassVector, basis: Sequence[SquareClassVector]
) -> Optional[list[int]]:
    """Indices S0 of basis with prod(S0) == target modulo squares, or None.

    Gaussian elimination over GF(2); columns are the sign plus the primes
    that actually occur. The answer is re-checked by exact multiplication.
    """
    primes = sorted(set(target.primes).union(*(b.primes for b in basis)) if basis else target.primes)
    index = {p: i + 1 for i, p in enumerate(primes)}
    # each row carries its combination of original basis vectors
    rows: list[tuple[int, int]] = [(_to_bits(b, index), 1 << i) for i, b in enumerate(basis)]
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, row bits, combo)
    for bits, combo in rows:
        for pbit, pbits, pcombo in pivots:
            if bits & pbit:
                bits ^= pbits
                combo ^= pcombo
        if bits:
            pbit = bits & -bits
            # keep earlier pivots reduced
            pivots = [
                (qb, qbits ^ bits, qcombo ^ combo) if qbits & pbit else (qb, qbits, qcombo)
                for qb, qbits, qcombo in pivots
            ]
            pivots.append((pbit, bits, combo))
    want = _to_bits(target, index)
    combo = 0
    for pbit, pbits, pcombo in pivots:
        if want & pbit:
            want ^= pbits
            combo ^= pcombo
    if want:
        return None
    chosen = [i for i in range(len(basis)) if combo >> i & 1]
    check = SquareClassVector(frozenset())
    for i in chosen:
        check = check * basis[i]
    if check != target:
        raise AssertionError("GF(2) solution failed reconstruction")
    return chosen


def gf2_rank(vectors: Iterable[SquareClassVector]) -> int:
    vectors = list(vectors)
    primes = sorted(set().union(*(v.primes for v in vectors))) if vectors else []
    index = {p: i + 1 for i, p in enumerate(primes)}
    pivots: dict[int, int] = {}
    for v in vectors:
        b = _to_bits(v, index)
        while b:
            top = b.bit_length() - 1
            if top not in pivots:
                pivots[top] = b
                break
            b ^= pivots[top]
    return len(pivots)


def subset_search(
    target: SquareClassVector, basis: Sequence[SquareClassVector]
) -> Optional[list[int]]:
    """Exhaustive oracle for gf2_express; exponential in len(basis).

    Walks all subsets in Gray-code order so each step toggles one vector.
    """
    cur = SquareClassVector(frozenset())
    if cur == target:
        return []
    mask = 0
    for step in range(1, 1 << len(basis)):
        i = (step & -step).bit_length() - 1
        mask ^= 1 << i
        cur = cur * basis[i]
        if cur == target:
            return [j for j in range(len(basis)) if mask >> j & 1]
    return None
