"""Parsing of field elements, base-field names and quadratic forms from strings.

Element syntax is ordinary arithmetic over rationals and ``sqrt(k)``, e.g.
``(5+sqrt(21))/2`` or ``3/2 + 1/2*sqrt(5)``; ``^`` is read as a power.
Forms are polynomials in x1, x2, ... such as ``x1^2 + 3*x1*x2 + x2^2``.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from typing import Union

from .arith import squarefree_part
from .basefield import QQ, BaseField, RationalField
from .biquadratic import BiquadElem, BiquadField
from .lattices import GramLattice
from .quadratic import QuadElem, QuadField

_VAR = re.compile(r"^x(\d+)$")


class ParseError(ValueError):
    pass


def parse_base(spec: str) -> BaseField:
    """'Q', '5' (Q(sqrt 5)) or '3,7' (Q(sqrt 3, sqrt 7))."""
    spec = spec.strip()
    if spec.upper() in ("Q", "QQ"):
        return QQ
    parts = [p for p in re.split(r"[,\s]+", spec) if p]
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"bad base field {spec!r}") from None
    if len(nums) == 1:
        return QuadField(nums[0])
    if len(nums) == 2:
        return BiquadField(*nums)
    raise ParseError(f"bad base field {spec!r}")


def _sqrt(base: BaseField, k: Fraction):
    if k < 0:
        raise ParseError("sqrt of a negative number")
    if k == 0:
        return base.zero()
    num = squarefree_part(k.numerator * k.denominator)
    coeff = Fraction(num.r, k.denominator)
    if num.s == 1:
        return base.coerce(coeff)
    if isinstance(base, QuadField) and num.s == base.D:
        return QuadElem(base, 0, coeff)
    if isinstance(base, BiquadField) and num.s in base.radicands:
        return base.gen(base.radicands.index(num.s) + 1) * coeff
    raise ParseError(f"sqrt({k}) does not lie in {base}")


# a polynomial is a dict mapping sorted variable-index tuples to base elements
Poly = dict


def _const(base, c) -> Poly:
    c = base.coerce(c)
    return {(): c} if c else {}


def _padd(base, p: Poly, q: Poly, s: int = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, base.zero()) + (c if s > 0 else -c)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(base, p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            v = out.get(m, base.zero()) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _eval(base, node, allow_vars: bool) -> Poly:
    if isinstance(node, ast.Expression):
        return _eval(base, node.body, allow_vars)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return _const(base, Fraction(str(node.value)))
    if isinstance(node, ast.Name):
        m = _VAR.match(node.id)
        if allow_vars and m and int(m.group(1)) >= 1:
            return {(int(m.group(1)) - 1,): base.one()}
        raise ParseError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        p = _eval(base, node.operand, allow_vars)
        return p if isinstance(node.op, ast.UAdd) else {m: -c for m, c in p.items()}
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1:
        arg = _eval(base, node.args[0], False)
        val = arg.get((), base.zero())
        rational = val if isinstance(val, Fraction) else _as_fraction(val)
        if rational is None or set(arg) - {()}:
            raise ParseError("sqrt takes a rational argument")
        return _const(base, _sqrt(base, rational))
    if isinstance(node, ast.BinOp):
        left = _eval(base, node.left, allow_vars)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int) and node.right.value >= 0):
                raise ParseError("exponents must be non-negative integer literals")
            out = _const(base, 1)
            for _ in range(node.right.value):
                out = _pmul(base, out, left)
            return out
        right = _eval(base, node.right, allow_vars)
        if isinstance(node.op, ast.Add):
            return _padd(base, left, right)
        if isinstance(node.op, ast.Sub):
            return _padd(base, left, right, -1)
        if isinstance(node.op, ast.Mult):
            return _pmul(base, left, right)
        if isinstance(node.op, ast.Div):
            if set(right) - {()} or not right:
                raise ParseError("division by a non-constant or zero")
            inv = base.one() / right[()]
            return {m: c * inv for m, c in left.items()}
    raise ParseError(f"unsupported syntax: {ast.dump(node)}")


def _as_fraction(e):
    if isinstance(e, QuadElem) and e.y == 0:
        return e.x
    if isinstance(e, BiquadElem) and e.is_rational():
        return e.coords[0]
    return None


def _parse_tree(text: str):
    try:
        return ast.parse(text.replace("√", "sqrt").replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None


def parse_element(base: BaseField, text: str):
    p = _eval(base, _parse_tree(text), False)
    return p.get((), base.zero())


def parse_form(base: BaseField, text: str, rank: int | None = None) -> GramLattice:
    """Gram matrix of a quadratic form written as a polynomial in x1..xn.

    Shorthand ``I<n>`` gives the identity form of rank n.
    """
    m = re.fullmatch(r"\s*I(\d+)\s*", text)
    if m:
        return GramLattice.identity(base, int(m.group(1)))
    poly = _eval(base, _parse_tree(text), True)
    n = max((max(mono) + 1 for mono in poly if mono), default=0)
    if rank is not None:
        if rank < n:
            raise ParseError(f"form uses x{n} but rank {rank} was requested")
        n = rank
    gram = [[base.zero() for _ in range(n)] for _ in range(n)]
    for mono, c in poly.items():
        if len(mono) != 2:
            raise ParseError("a quadratic form must be homogeneous of degree 2")
        i, j = mono
        if i == j:
            gram[i][i] = c
        else:
            gram[i][j] = gram[j][i] = c / 2
    return GramLattice(base, gram)


def parse_vector(base: BaseField, text: str) -> list:
    """Comma-separated elements, optionally in brackets."""
    text = text.strip().strip("[]")
    parts = _split_top(text)
    return [parse_element(base, p) for p in parts if p.strip()]


def _split_top(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in ",;" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_gram_json(base: BaseField, rows) -> GramLattice:
    """Gram matrix from a JSON array of element strings."""
    return GramLattice(base, [[parse_element(base, str(x)) for x in row] for row in rows])


def element_to_json(e) -> Union[str, dict]:
    if isinstance(e, (int, Fraction)):
        return str(Fraction(e))
    return e.to_json()
