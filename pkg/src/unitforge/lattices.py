"""Free quadratic lattices given by Gram matrices over Q or a real quadratic field."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

from .arith import rational_sqrt
from .basefield import (
    QQ,
    BaseField,
    RationalField,
    conjugates,
    integral_points,
    is_totally_nonnegative,
    sign,
)
from .biquadratic import BiquadField
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    NonDiagonal,
    NotClassical,
    NotTotallyPositiveUnit,
    NotUnit,
    RepresentationNotFound,
    UnsupportedBase,
)
from .quadratic import QuadElem, QuadField, quad_sqrt

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class GramLattice:
    base: BaseField
    gram: tuple[tuple, ...]

    def __init__(self, base: BaseField, gram: Sequence[Sequence]) -> None:
        rows = tuple(tuple(base.coerce(x) for x in row) for row in gram)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "gram", rows)

    @classmethod
    def diagonal(cls, base: BaseField, entries: Sequence) -> "GramLattice":
        n = len(entries)
        return cls(base, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def identity(cls, base: BaseField, n: int) -> "GramLattice":
        return cls.diagonal(base, [1] * n)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def _vec(self, v: Sequence) -> list:
        if len(v) != self.rank:
            raise DimensionMismatch(f"vector of length {len(v)} for a rank {self.rank} lattice")
        return [self.base.coerce(x) for x in v]

    def bilinear(self, v: Sequence, w: Sequence):
        v, w = self._vec(v), self._vec(w)
        total = self.base.zero()
        for i, vi in enumerate(v):
            if not vi:
                continue
            for j, wj in enumerate(w):
                if wj and self.gram[i][j]:
                    total = total + vi * self.gram[i][j] * wj
        return total

    def evaluate(self, v: Sequence):
        return self.bilinear(v, v)

    def is_diagonal(self) -> bool:
        return all(not self.gram[i][j] for i in range(self.rank) for j in range(self.rank) if i != j)

    def diagonal_entries(self) -> list:
        return [self.gram[i][i] for i in range(self.rank)]

    def is_integral(self) -> bool:
        b = self.base
        for i in range(self.rank):
            if not b.is_integral(self.gram[i][i]):
                return False
            for j in range(i + 1, self.rank):
                if not b.is_integral(2 * self.gram[i][j]):
                    return False
        return True

    def is_classical(self) -> bool:
        return all(self.base.is_integral(x) for row in self.gram for x in row)

    def pivots(self) -> Optional[list]:
        """Pivots of symmetric elimination (ratios of leading minors), or None on a zero pivot."""
        a = [list(r) for r in self.gram]
        n = self.rank
        out = []
        for k in range(n):
            p = a[k][k]
            if not p:
                return None
            out.append(p)
            for i in range(k + 1, n):
                f = a[i][k] / p
                if f:
                    for j in range(k, n):
                        a[i][j] = a[i][j] - f * a[k][j]
        return out

    def determinant(self):
        piv = self.pivots()
        if piv is None:
            return _det(self.gram, self.base)
        d = self.base.one()
        for p in piv:
            d = d * p
        return d

    def is_positive_definite(self) -> bool:
        # leading minors totally positive <=> every pivot totally positive
        piv = self.pivots()
        return piv is not None and all(self.base.is_totally_positive(p) for p in piv)

    def to_json(self) -> dict:
        return {"base": base_to_json(self.base), "gram": [[str(x) for x in row] for row in self.gram]}

    def __str__(self) -> str:
        rows = "; ".join(", ".join(str(x) for x in r) for r in self.gram)
        return f"GramLattice over {self.base}: [{rows}]"


def base_to_json(base: BaseField) -> dict:
    if isinstance(base, RationalField):
        return {"kind": "Q"}
    if isinstance(base, QuadField):
        return {"kind": "quadratic", "D": base.D}
    return {"kind": "biquadratic", "d1": base.d1, "d2": base.d2}


def _det(m, base):
    # cofactor expansion fallback for singular leading minors
    n = len(m)
    if n == 0:
        return base.one()
    total = base.zero()
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor, base)
        total = total + term if j % 2 == 0 else total - term
    return total


# --- unit splitting -------------------------------------------------------------


@dataclass
class SplitResult:
    unit_vector: list
    complement_basis: list[list]
    new_gram: list[list]
    lattice: GramLattice

    @property
    def new_lattice(self) -> GramLattice:
        return GramLattice(self.lattice.base, self.new_gram)

    def full_gram(self) -> list[list]:
        basis = [self.unit_vector] + self.complement_basis
        return [[self.lattice.bilinear(v, w) for w in basis] for v in basis]

    def to_json(self) -> dict:
        return {
            "unit_vector": [str(x) for x in self.unit_vector],
            "complement_basis": [[str(x) for x in v] for v in self.complement_basis],
            "new_gram": [[str(x) for x in r] for r in self.new_gram],
        }


def split_unit(L: GramLattice, v: Sequence) -> SplitResult:
    """L = O v  (orthogonal sum)  L', with L' spanned by e_i - B(e_i, v) Q(v)^-1 v.

    The basis completion drops a coordinate j where v_j is a unit, so
    {v} together with the remaining e_i is again a basis of O^n.
    """
    if not L.is_classical():
        raise NotClassical("unit splitting needs a classical lattice")
    b = L.base
    v = L._vec(v)
    q = L.evaluate(v)
    if not (b.is_integral(q) and b.is_unit(q)):
        raise NotUnit(f"Q(v) = {q} is not a unit")
    pivot = next((j for j, x in enumerate(v) if b.is_integral(x) and b.is_unit(x)), None)
    if pivot is None:
        raise NotUnit(f"no coordinate of {v} is a unit, basis completion unsupported")
    qinv = b.one() / q
    n = L.rank
    comp = []
    for i in range(n):
        if i == pivot:
            continue
        e = [b.one() if k == i else b.zero() for k in range(n)]
        c = L.bilinear(e, v) * qinv
        comp.append([e[k] - c * v[k] for k in range(n)])
    new_gram = [[L.bilinear(x, y) for y in comp] for x in comp]
    res = SplitResult(v, comp, new_gram, L)
    for w in comp:
        if L.bilinear(v, w):
            raise AssertionError("complement vector not orthogonal to v")
    return res


# --- representation search ------------------------------------------------------


def _box(base, rem, a) -> list[tuple[float, float]]:
    """Per-embedding bound |sigma(g)| <= sqrt(sigma(rem)/sigma(a)), as float boxes."""
    out = []
    for r, s in zip(conjugates(base, rem), conjugates(base, a)):
        ratio = max(float(r) / float(s), 0.0)
        bound = math.sqrt(ratio) * (1 + 1e-9) + 1e-9
        out.append((-bound, bound))
    return out


def _exact_sqrt(base, x):
    """An integral square root of x in the base, or None."""
    if isinstance(base, RationalField):
        r = rational_sqrt(Fraction(x))
        return r if r is not None and r.denominator == 1 else None
    r = quad_sqrt(base.coerce(x))
    return r if r is not None and r.is_integer() else None


class _Search:
    def __init__(self, L: GramLattice, budget: int) -> None:
        self.L = L
        self.base = L.base
        self.a = L.diagonal_entries()
        self.budget = budget
        self.nodes = 0
        self.truncated = False
        self._cands: dict = {}

    def candidates(self, i: int, rem) -> list:
        key = (i, rem)
        if key in self._cands:
            return self._cands[key]
        b, a = self.base, self.a[i]
        out = []
        for g in integral_points(b, _box(b, rem, a)):
            if sign(g) < 0:
                continue  # g and -g give the same value
            if is_totally_nonnegative(b, rem - a * g * g):
                out.append(g)
        out.sort(key=lambda g: -abs(float(g)))
        self._cands[key] = out
        return out

    def run(self, i: int, rem) -> Optional[list]:
        b = self.base
        n = len(self.a)
        if not rem:
            return [b.zero()] * (n - i)
        if i == n - 1:
            self.nodes += 1
            g = _exact_sqrt(b, rem / self.a[i])
            return [g] if g is not None else None
        for g in self.candidates(i, rem):
            self.nodes += 1
            if self.nodes > self.budget:
                self.truncated = True
                return None
            rest = self.run(i + 1, rem - self.a[i] * g * g)
            if rest is not None:
                return [g] + rest
            if self.truncated:
                return None
        return None


@dataclass
class RepresentResult:
    vector: Optional[list]
    nodes: int
    exhaustive: bool  # True when absence of a vector is a proof

    def to_json(self) -> dict:
        return {
            "vector": None if self.vector is None else [str(x) for x in self.vector],
            "nodes": self.nodes,
            "exhaustive": self.exhaustive,
            "procedure": "per-embedding box search (implementation choice)",
        }


def represent_search(L: GramLattice, beta, exhaustive: bool = True, budget: int = DEFAULT_BUDGET) -> RepresentResult:
    b = L.base
    if isinstance(b, BiquadField):
        raise UnsupportedBase("representation search supports Q and real quadratic bases")
    if not L.is_diagonal():
        raise NonDiagonal("representation search needs a diagonal Gram matrix")
    if not all(b.is_totally_positive(x) for x in L.diagonal_entries()):
        raise NonDiagonal("diagonal entries must be totally positive")
    beta = b.coerce(beta)
    if not (b.is_integral(beta) and is_totally_nonnegative(b, beta)):
        raise ValueError(f"target {beta} must be a totally positive integer")
    s = _Search(L, budget)
    vec = s.run(0, beta)
    if vec is not None:
        if L.evaluate(vec) != beta:
            raise AssertionError("representation does not evaluate to the target")
        return RepresentResult(vec, s.nodes, True)
    if s.truncated:
        if exhaustive:
            raise BudgetExceeded(budget)
        return RepresentResult(None, s.nodes, False)
    return RepresentResult(None, s.nodes, True)


def represent(L: GramLattice, beta, exhaustive: bool = True, budget: int = DEFAULT_BUDGET) -> Optional[list]:
    """A vector v with Q(v) = beta, or None. With ``exhaustive`` a None is a proof of absence."""
    return represent_search(L, beta, exhaustive, budget).vector


# --- indecomposability and the rank lower bound --------------------------------


def decompositions(base: BaseField, beta, limit: int = 1) -> list:
    """Up to ``limit`` totally positive integers alpha with beta - alpha totally positive."""
    if isinstance(base, BiquadField):
        raise UnsupportedBase("decomposition search supports Q and real quadratic bases")
    beta = base.coerce(beta)
    bounds = [(0.0, float(c)) for c in conjugates(base, beta)]
    found = []
    for a in integral_points(base, bounds):
        if base.is_totally_positive(a) and base.is_totally_positive(beta - a):
            found.append(a)
            if len(found) >= limit:
                break
    return found


def is_indecomposable(base: BaseField, beta) -> bool:
    return not decompositions(base, beta)


@dataclass
class RankBoundOutcome:
    kind: str  # "SplitsCompleted" | "RepresentationNotFound"
    splits: int
    failed_unit: Optional[object] = None
    evidence: dict = field(default_factory=dict)
    split_vectors: list = field(default_factory=list)
    classes_distinct: bool = True

    def to_json(self) -> dict:
        return {
            "outcome": self.kind,
            "splits": self.splits,
            "failed_unit": None if self.failed_unit is None else str(self.failed_unit),
            "evidence": self.evidence,
            "split_vectors": [[str(x) for x in v] for v in self.split_vectors],
            "classes_distinct": self.classes_distinct,
        }


def _classes_pairwise_distinct(base: BaseField, units: Sequence) -> bool:
    for u, w in combinations(units, 2):
        q = base.coerce(u) / base.coerce(w)
        if isinstance(base, RationalField):
            if rational_sqrt(q) is not None:
                return False
        elif quad_sqrt(q) is not None:
            return False
    return True


def rank_lower_bound_run(L: GramLattice, units: Sequence, budget: int = DEFAULT_BUDGET) -> RankBoundOutcome:
    """Replay the rank-at-least-m induction on a concrete lattice.

    At step k the unit e_k is sought in the orthogonal complement of the
    vectors split off so far. Because e_k is indecomposable, any
    representation by the full lattice has exactly one nonzero orthogonal
    summand; when the classes of the units are distinct that summand cannot
    come from an earlier split line, so searching the complement loses nothing.
    """
    if not L.is_classical():
        raise NotClassical("rank bound needs a classical lattice")
    if not L.is_positive_definite():
        raise ValueError("lattice must be positive definite")
    b = L.base
    units = [b.coerce(u) for u in units]
    for u in units:
        if not (b.is_integral(u) and b.is_unit(u) and b.is_totally_positive(u)):
            raise NotTotallyPositiveUnit(f"{u} is not a totally positive unit")
        if not is_indecomposable(b, u):
            raise AssertionError(f"unit {u} decomposes as a sum of totally positive integers")
    distinct = _classes_pairwise_distinct(b, units)
    current = L
    # track the complement basis in coordinates of the original lattice
    basis = [[b.one() if i == j else b.zero() for j in range(L.rank)] for i in range(L.rank)]
    split_vectors = []
    for k, u in enumerate(units):
        if current.rank == 0:
            return RankBoundOutcome("RepresentationNotFound", k, u, {"reason": "complement has rank 0", "exhaustive": True},
                                    split_vectors, distinct)
        res = represent_search(current, u, exhaustive=True, budget=budget)
        if res.vector is None:
            return RankBoundOutcome("RepresentationNotFound", k, u, res.to_json(), split_vectors, distinct)
        sr = split_unit(current, res.vector)
        split_vectors.append(_combine(b, res.vector, basis))
        basis = [_combine(b, w, basis) for w in sr.complement_basis]
        current = sr.new_lattice
    return RankBoundOutcome("SplitsCompleted", len(units), None, {}, split_vectors, distinct)


def _combine(b, coeffs, basis):
    n = len(basis[0]) if basis else 0
    out = [b.zero()] * n
    for c, vec in zip(coeffs, basis):
        if c:
            out = [x + c * y for x, y in zip(out, vec)]
    return out


def subset_products(base: BaseField, e: Sequence) -> list:
    """prod_{j in I} e_j for I ranging over subsets of {1..n}, indexed by bitmask."""
    out = []
    for mask in range(1 << len(e)):
        p = base.one()
        for j, x in enumerate(e):
            if mask >> j & 1:
                p = p * base.coerce(x)
        out.append(p)
    return out


def diagonal_universal_2n(base: BaseField, e: Sequence) -> GramLattice:
    for x in e:
        x = base.coerce(x)
        if not (base.is_integral(x) and base.is_unit(x) and base.is_totally_positive(x)):
            raise NotTotallyPositiveUnit(f"{x} is not a totally positive unit")
    return GramLattice.diagonal(base, subset_products(base, e))
