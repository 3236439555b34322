"""Named reproduction scenarios: each recomputes a published example and checks it exactly."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .arith import is_perfect_square, squarefree_part
from .basefield import QQ
from .biquadratic import BiquadField, biquad_sqrt, cor63_test, prop65_family
from .lattices import GramLattice, represent
from .quadratic import QuadElem, QuadField, delta, fundamental_unit, quad_sqrt
from .squareclasses import example53_family, example54_family, theorem72_certificate, verify_certificate


@dataclass
class ScenarioResult:
    scenario: str
    inputs: dict
    outputs: dict
    checks: dict[str, bool] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def all_checks_passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "all_checks_passed": self.all_checks_passed,
            "elapsed": round(self.elapsed, 4),
        }


def _q(D: int, x, y) -> QuadElem:
    return QuadElem(QuadField(D), Fraction(x), Fraction(y))


def unit_table() -> ScenarioResult:
    expected = {3: (_q(3, 2, 1), 6), 7: (_q(7, 8, 3), 2), 21: (_q(21, Fraction(5, 2), Fraction(1, 2)), 7)}
    out, checks = {}, {}
    for D, (eps, d) in expected.items():
        K = QuadField(D)
        got_eps, got_d = fundamental_unit(K), delta(K)
        out[str(D)] = {"eps": str(got_eps), "delta": got_d}
        checks[f"eps D={D}"] = got_eps == eps
        checks[f"delta D={D}"] = got_d == d
    checks["eps_3 norm 1"] = fundamental_unit(QuadField(3)).norm() == 1
    checks["eps_3 totally positive"] = fundamental_unit(QuadField(3)).is_totally_positive()
    checks["2+sqrt3 not a square"] = quad_sqrt(_q(3, 2, 1)) is None
    return ScenarioResult("unit-table", {"D": [3, 7, 21]}, out, checks)


def arith_examples() -> ScenarioResult:
    sf = squarefree_part(18)
    checks = {"18 = 2 * 3^2": (sf.s, sf.r) == (2, 3), "3 not a square": not is_perfect_square(3)}
    return ScenarioResult("arith", {"n": [18, 3]}, {"squarefree(18)": [sf.s, sf.r]}, checks)


def biquad_roots() -> ScenarioResult:
    F = BiquadField(3, 7)
    e1, e2, e3 = F.embed(_q(3, 2, 1)), F.embed(_q(7, 8, 3)), F.embed(_q(21, Fraction(5, 2), Fraction(1, 2)))
    h = Fraction(1, 2)
    expected = {
        "sqrt(eps1 eps2)": (e1 * e2, F(3 * h, 3 * h, h, h)),
        "sqrt(eps3)": (e3, F(0, h, h, 0)),
        "sqrt(eps1 eps2 eps3)": (e1 * e2 * e3, F(4, 5 * h, 3 * h, 1)),
    }
    out, checks = {}, {}
    for name, (target, root) in expected.items():
        got = biquad_sqrt(target)
        out[name] = None if got is None else str(got)
        checks[f"{name} matches"] = got is not None and (got == root or got == -root)
        checks[f"{name} squares back"] = root * root == target
        checks[f"{name} mixed signs"] = not root.is_totally_positive() and not root.is_totally_negative()
    r = cor63_test(e3)
    out["cor63(eps3)"] = r.to_json()
    checks["eps3 in K^2 Q^x"] = r.in_Q_square_class
    return ScenarioResult("biquad-roots", {"d1": 3, "d2": 7}, out, checks)


def prop65_examples(ns=(1, 13)) -> ScenarioResult:
    out, checks = {}, {}
    for n in ns:
        r = prop65_family(n)
        out[str(n)] = r.to_json()
        checks[f"n={n}"] = r.all_passed
    return ScenarioResult("prop65", {"n": list(ns)}, out, checks)


def families() -> ScenarioResult:
    e53 = example53_family(1)[0]
    e54 = example54_family([3, 7])[0]
    checks = {
        "n0 = 1, eps0 = 2+sqrt3": e53.n == 1 and e53.eps == _q(3, 2, 1),
        "class of eps0 is 6": e53.square_class == 6,
        "(3,7) gives delta 7": e54.delta == 7 and e54.field.D == 21,
    }
    return ScenarioResult("families", {"example53_m": 1, "example54_primes": [3, 7]},
                          {"example53": e53.to_json(), "example54": e54.to_json()}, checks)


def certificate(m: int = 5) -> ScenarioResult:
    cert = theorem72_certificate(m)
    doc = cert.to_json()
    return ScenarioResult("thm72-cert", {"m": m}, {"units": len(doc["units"])},
                          {"size": cert.size == m, "re-verifies": verify_certificate(doc)})


def maass_example() -> ScenarioResult:
    K = QuadField(5)
    beta = _q(5, Fraction(5, 2), Fraction(1, 2))
    L = GramLattice.identity(K, 3)
    v = represent(L, beta)
    checks = {"represented": v is not None and L.evaluate(v) == beta}
    return ScenarioResult("sum-of-three-squares", {"D": 5, "beta": str(beta)},
                          {"vector": None if v is None else [str(x) for x in v]}, checks)


def seven_not_three_squares() -> ScenarioResult:
    v = represent(GramLattice.identity(QQ, 3), 7)
    return ScenarioResult("seven", {"beta": 7}, {"vector": v}, {"absent": v is None})


SCENARIOS: dict[str, Callable[[], ScenarioResult]] = {
    "arith": arith_examples,
    "unit-table": unit_table,
    "biquad-roots": biquad_roots,
    "prop65": prop65_examples,
    "families": families,
    "thm72-cert": certificate,
    "sum-of-three-squares": maass_example,
    "seven": seven_not_three_squares,
}


def run_all() -> list[ScenarioResult]:
    results = []
    for name, fn in SCENARIOS.items():
        t = time.perf_counter()
        r = fn()
        r.elapsed = time.perf_counter() - t
        results.append(r)
    return results
