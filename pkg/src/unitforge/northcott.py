"""House, Weil height, bounded-house enumeration and the lattice descent iteration."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arith import rational_sqrt
from .basefield import QQ, RationalField, conjugates, integral_points, sign
from .biquadratic import BiquadElem
from .errors import MaxIterExceeded, NotIntegral, RepresentationNotFound
from .exactreal import ExactReal
from .lattices import GramLattice, represent
from .quadratic import QuadElem, QuadField


def house_of(e) -> ExactReal:
    """Maximum absolute value over the conjugates, held exactly."""
    if isinstance(e, (int, Fraction)):
        return ExactReal(abs(Fraction(e)))
    return e.house()


def _base_of(e):
    if isinstance(e, (int, Fraction)):
        return QQ
    return e.field


def _degree(e) -> int:
    if isinstance(e, (int, Fraction)):
        return 1
    if isinstance(e, QuadElem):
        return 1 if e.y == 0 else 2
    nz = sum(1 for c in e.coords[1:] if c)
    return 1 if nz == 0 else 2 if nz == 1 else 4


def _is_integral(e) -> bool:
    if isinstance(e, (int, Fraction)):
        return Fraction(e).denominator == 1
    return e.is_integer()


def _abs(e):
    return -e if sign(e) < 0 else e


@dataclass
class HeightReport:
    elem: object
    degree: int
    house: ExactReal
    weil: float
    weil_error: float
    inequality_exact: bool  # prod max(1, |a_i|) <= house^deg, decided exactly

    @property
    def log_house(self) -> float:
        return math.log(float(self.house))

    def to_json(self) -> dict:
        return {
            "elem": str(self.elem),
            "degree": self.degree,
            "house": str(self.house.value),
            "house_float": float(self.house),
            "weil": self.weil,
            "weil_error": self.weil_error,
            "log_house": self.log_house,
            "inequality_exact": self.inequality_exact,
        }


def weil_height(e) -> HeightReport:
    """h(e) = (1/deg) sum over conjugates of log max(1, |e_i|), for a nonzero algebraic integer."""
    if not e:
        raise ValueError("the height inequality needs a nonzero element")
    if not _is_integral(e):
        raise NotIntegral(f"{e} is not an algebraic integer")
    base = _base_of(e)
    conj: list = []
    for c in conjugates(base, e):
        if c not in conj:
            conj.append(c)
    deg = _degree(e)
    if len(conj) != deg:
        raise AssertionError(f"found {len(conj)} distinct conjugates for degree {deg}")
    lo_sum = hi_sum = 0.0
    prod = Fraction(1) if base is QQ else base.one()
    for c in conj:
        lo, hi = ExactReal(c).enclosure(80)
        alo, ahi = (lo, hi) if lo >= 0 else (-hi, -lo) if hi <= 0 else (Fraction(0), max(-lo, hi))
        lo_sum += math.log(max(1.0, float(alo)))
        hi_sum += math.log(max(1.0, float(ahi)))
        a = _abs(c)
        if sign(a - 1) > 0:
            prod = prod * a
    weil = (lo_sum + hi_sum) / (2 * deg)
    err = (hi_sum - lo_sum) / (2 * deg) + 4 * abs(weil) * 2**-52 + 1e-300
    H = house_of(e)
    holds = ExactReal(H.value**deg - prod).sign() >= 0 and ExactReal(H.value - 1).sign() >= 0
    return HeightReport(e, deg, H, weil, err, holds)


def enumerate_tp_integers(base, r) -> list:
    """All totally positive integers of the base with house < r, in a canonical order."""
    r = Fraction(r)
    if r <= 0:
        return []
    bounds = [(0.0, float(r))] * (1 if isinstance(base, RationalField) else 2)
    out = []
    for a in integral_points(base, bounds):
        if base.is_totally_positive(a) and house_of(a) < r:
            out.append(a)
    return sorted(set(out), key=lambda a: (float(a), str(a)))


@dataclass
class NorthcottProfile:
    r: Fraction
    fields: list
    counts: list[int]

    @property
    def cumulative(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict:
        return {
            "r": str(self.r),
            "rows": [{"D": getattr(F, "D", 1), "count": c} for F, c in zip(self.fields, self.counts)],
            "cumulative": self.cumulative,
            "label": "quadratic-layer lower bound for the compositum count; not a Northcott number",
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["D", "r", "count"])
        for F, c in zip(self.fields, self.counts):
            w.writerow([getattr(F, "D", 1), str(self.r), c])
        w.writerow(["total", str(self.r), self.cumulative])
        return buf.getvalue()


def northcott_profile(fields: Sequence, r) -> NorthcottProfile:
    r = Fraction(r)
    return NorthcottProfile(r, list(fields), [len(enumerate_tp_integers(F, r)) for F in fields])


# --- descent ------------------------------------------------------------------------


def _canonical(elems) -> list:
    return sorted(set(elems), key=lambda a: (float(a), str(a)))


def descent_step(L: GramLattice, beta, gamma: Optional[Sequence] = None) -> list:
    """beta_j = gamma_j + floor(house(gamma_j)) + 1 for a representation beta = Q(gamma)."""
    b = L.base
    beta = b.coerce(beta)
    if gamma is None:
        gamma = represent(L, beta, exhaustive=True)
        if gamma is None:
            raise RepresentationNotFound(f"{beta} is not represented by the lattice")
    else:
        gamma = [b.coerce(g) for g in gamma]
        if L.evaluate(gamma) != beta:
            raise ValueError(f"Q(gamma) != {beta}")
    out = []
    for g in gamma:
        hg = house_of(g)
        bj = g + hg.floor() + 1
        if not b.is_totally_positive(bj):
            raise AssertionError(f"shifted coordinate {bj} is not totally positive")
        # equality happens exactly when house(g) is a rational integer
        if house_of(bj) > ExactReal(2 * hg.value + 1):
            raise AssertionError(f"house({bj}) > 2 house({g}) + 1")
        out.append(bj)
    return _canonical(out)


def descent_constant_sq(L: GramLattice):
    """C^2 = max_i max_sigma 1/sigma(a_i) for a diagonal lattice, as a base-field element."""
    if not L.is_diagonal():
        raise ValueError("the descent constant is only derived for diagonal lattices")
    best = None
    for a in L.diagonal_entries():
        for c in conjugates(L.base, a):
            inv = 1 / c
            if best is None or sign(inv - best) > 0:
                best = inv
    return best


def below_threshold(h, c2) -> bool:
    """house < (2C+1)^2 with C = sqrt(c2), decided exactly.

    With t = h - 4C^2 - 1 this is t < 4C, i.e. t < 0 or t^2 < 16 C^2.
    """
    t = h - 4 * c2 - 1
    return sign(t) < 0 or sign(t * t - 16 * c2) < 0


@dataclass
class DescentTrace:
    levels: list[list]
    constant_sq: object
    terminated: bool = False
    max_houses: list = field(default_factory=list)

    @property
    def threshold_float(self) -> float:
        return (2 * math.sqrt(float(self.constant_sq)) + 1) ** 2

    def _rational_C(self) -> Optional[Fraction]:
        c2 = self.constant_sq
        if isinstance(c2, QuadElem) and c2.is_rational():
            c2 = c2.x
        if isinstance(c2, BiquadElem) and c2.is_rational():
            c2 = c2.coords[0]
        return rational_sqrt(Fraction(c2)) if isinstance(c2, (int, Fraction)) else None

    @property
    def threshold_str(self) -> str:
        c = self._rational_C()
        if c is not None:
            return str((2 * c + 1) ** 2)
        return f"(2*sqrt({self.constant_sq}) + 1)^2"

    @property
    def C_str(self) -> str:
        c = self._rational_C()
        return str(c) if c is not None else f"sqrt({self.constant_sq})"

    def monotone_above_threshold(self) -> bool:
        for prev, nxt in zip(self.max_houses, self.max_houses[1:]):
            if not below_threshold(prev.value, self.constant_sq) and not nxt < prev:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "levels": [[str(x) for x in lvl] for lvl in self.levels],
            "C": self.C_str,
            "threshold": self.threshold_str,
            "max_house_per_level": [float(h) for h in self.max_houses],
            "terminated": self.terminated,
            "monotone_above_threshold": self.monotone_above_threshold(),
        }


def descent_run(L: GramLattice, alpha, max_iter: int = 20) -> DescentTrace:
    c2 = descent_constant_sq(L)
    alpha = L.base.coerce(alpha)
    trace = DescentTrace([[alpha]], c2)
    for it in range(max_iter + 1):
        level = trace.levels[-1]
        houses = [house_of(x) for x in level]
        trace.max_houses.append(max(houses))
        if all(below_threshold(h.value, c2) for h in houses):
            trace.terminated = True
            return trace
        if it == max_iter:
            break
        nxt = []
        for beta in level:
            nxt.extend(descent_step(L, beta))
        trace.levels.append(_canonical(nxt))
    raise MaxIterExceeded(trace)
