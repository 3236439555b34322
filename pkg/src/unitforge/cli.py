"""Command-line front end. JSON goes to stdout, a one-line summary to stderr.

Exit codes: 0 when every check passes, 1 on a failed verification or a
search that came back empty, 2 on bad usage or invalid input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from typing import Callable, Optional

from . import __version__
from .arith import SquareClassVector, gf2_express, squarefree_part
from .basefield import QQ, degree
from .biquadratic import BiquadField, biquad_sqrt, cor63_test, prop65_family
from .errors import UnitforgeError, VerificationError
from .lattices import (
    DEFAULT_BUDGET,
    diagonal_universal_2n,
    rank_lower_bound_run,
    represent_search,
    split_unit,
    subset_products,
)
from .northcott import descent_run, descent_step, enumerate_tp_integers, northcott_profile, weil_height
from .parsing import ParseError, parse_base, parse_element, parse_form, parse_vector
from .quadratic import QuadField, delta, fundamental_unit, lemma51_witness, pell_report, signature_rank
from .scenarios import run_all
from .squareclasses import (
    FamilyEntry,
    MultiquadDescriptor,
    example53_family,
    example53_nonsquare_checks,
    example54_family,
    greedy_disjoint_select,
    is_square_in,
    prop65_entries,
    theorem72_certificate,
    verify_certificate,
)


class Result:
    def __init__(self, payload: dict, ok: bool, summary: str) -> None:
        self.payload, self.ok, self.summary = payload, ok, summary


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _biquad(args) -> BiquadField:
    return BiquadField(args.d1, args.d2)


# --- quadratic fields -------------------------------------------------------------


def cmd_fund_unit(args) -> Result:
    K = QuadField(args.D)
    eps = fundamental_unit(K)
    out = {"D": args.D, "eps": str(eps), "eps_json": eps.to_json(), "norm": int(eps.norm())}
    if eps.norm() == 1:
        out["delta"] = delta(K)
    ok = eps.is_unit() and eps.sign() > 0
    return Result(out, ok, f"eps = {eps}" + (f", delta = {out['delta']}" if "delta" in out else ", norm -1"))


def cmd_delta(args) -> Result:
    d = delta(QuadField(args.D))
    return Result({"D": args.D, "delta": d}, True, f"delta = {d}")


def cmd_pell_report(args) -> Result:
    Ds = [args.D] if args.D else [d for d in range(args.lo, args.hi + 1) if d >= 2 and squarefree_part(d).s == d]
    rows = []
    for D in Ds:
        r = pell_report(D)
        rows.append({"D": D, **r._asdict(), "consistent": r.consistent()})
    bad = [r["D"] for r in rows if not r["consistent"]]
    return Result({"reports": rows, "violations": bad}, not bad, f"{len(rows)} fields, {len(bad)} violations")


def cmd_sig_rank(args) -> Result:
    r = signature_rank(QuadField(args.D))
    return Result({"D": args.D, "rank": r.rank, "tp_units_mod_squares": r.quotient_size}, True,
                  f"signature rank {r.rank}, |O+x/Ox2| = {r.quotient_size}")


def cmd_lemma51(args) -> Result:
    K = QuadField(args.D)
    e = parse_element(K, args.elem) if args.elem else fundamental_unit(K)
    beta, t = lemma51_witness(e)
    sf = squarefree_part(int(t)) if Fraction(t).denominator == 1 else None
    out = {"e": str(e), "beta": str(beta), "trace": str(t)}
    if sf is not None:
        out["squarefree_part"] = sf.s
    return Result(out, True, f"e * ({beta})^2 = {t}")


# --- biquadratic -------------------------------------------------------------------


def cmd_biquad_sqrt(args) -> Result:
    F = _biquad(args)
    e = F.coerce(parse_element(F, args.elem))
    s = biquad_sqrt(e)
    if s is None:
        return Result({"elem": str(e), "sqrt": None}, False, "no square root in K")
    out = {"elem": str(e), "sqrt": str(s), "sqrt_json": s.to_json(), "signs": list(s.embedding_signs()),
           "totally_positive": s.is_totally_positive(), "totally_negative": s.is_totally_negative()}
    return Result(out, s * s == e, f"sqrt = {s}")


def cmd_cor63(args) -> Result:
    F = _biquad(args)
    e = F.coerce(parse_element(F, args.elem))
    r = cor63_test(e)
    return Result({"elem": str(e), **r.to_json()}, True, f"in K^2 Q^x: {r.in_Q_square_class}")


def cmd_prop65(args) -> Result:
    r = prop65_family(args.n)
    return Result(r.to_json(), r.all_passed, f"n = {args.n}: {'all checks pass' if r.all_passed else 'FAILED'}")


# --- square classes ------------------------------------------------------------------


def cmd_kummer(args) -> Result:
    target = Fraction(args.target)
    if args.family:
        desc = MultiquadDescriptor(family=args.family, prefix=args.prefix)
    else:
        desc = MultiquadDescriptor(tuple(_int_list(args.basis)))
    square = is_square_in(target, desc)
    out = {"target": str(target), "square": square}
    if not desc.all_squarefree:
        gens = desc.materialize()
        combo = gf2_express(SquareClassVector.of(target), [SquareClassVector.of(g) for g in gens])
        out["generators"] = list(gens)
        out["combination"] = None if combo is None else [gens[i] for i in combo]
    return Result(out, True, f"{target} is {'a square' if square else 'not a square'}")


def cmd_family53(args) -> Result:
    entries = example53_family(args.m)
    checks = example53_nonsquare_checks(entries)
    return Result({"entries": [e.to_json() for e in entries], "checks": checks}, all(checks.values()),
                  f"n = {[e.n for e in entries]}")


def cmd_family54(args) -> Result:
    entries = example54_family(_int_list(args.primes))
    return Result({"entries": [e.to_json() for e in entries]}, True, f"delta = {[e.delta for e in entries]}")


def _cert_result(cert) -> Result:
    doc = cert.to_json()
    ok = verify_certificate(doc)
    return Result({"certificate": doc, "verified": ok}, ok, f"{cert.size} distinct classes, verified = {ok}")


def cmd_greedy_select(args) -> Result:
    entries = (FamilyEntry(e.alpha, e.sub_index) for e in prop65_entries(args.n_max))
    return _cert_result(greedy_disjoint_select(entries, args.m))


def cmd_thm72_cert(args) -> Result:
    return _cert_result(theorem72_certificate(args.m))


def cmd_verify_cert(args) -> Result:
    with open(args.file) as fh:
        doc = json.load(fh)
    doc = doc.get("certificate", doc)
    ok = verify_certificate(doc)
    return Result({"verified": ok}, ok, f"verified = {ok}")


# --- lattices --------------------------------------------------------------------------


def _lattice(args):
    base = parse_base(args.base)
    return base, parse_form(base, args.form)


def cmd_lattice_eval(args) -> Result:
    base, L = _lattice(args)
    v = parse_vector(base, args.v)
    out = {"gram": L.to_json(), "Q(v)": str(L.evaluate(v)), "integral": L.is_integral(),
           "classical": L.is_classical(), "positive_definite": L.is_positive_definite()}
    if args.w:
        out["B(v,w)"] = str(L.bilinear(v, parse_vector(base, args.w)))
    return Result(out, True, f"Q(v) = {out['Q(v)']}")


def cmd_lattice_split(args) -> Result:
    base, L = _lattice(args)
    r = split_unit(L, parse_vector(base, args.v))
    full = r.full_gram()
    block = all(not full[0][j] and not full[j][0] for j in range(1, len(full)))
    return Result(r.to_json(), block, f"split off Q(v) = {L.evaluate(r.unit_vector)}, complement rank {L.rank - 1}")


def cmd_universal_2n(args) -> Result:
    base = parse_base(args.base)
    units = parse_vector(base, args.units) if args.units else []
    L = diagonal_universal_2n(base, units)
    return Result({"lattice": L.to_json(), "rank": L.rank}, L.is_classical() and L.is_positive_definite(),
                  f"rank {L.rank}")


def cmd_rank_bound(args) -> Result:
    base = parse_base(args.base)
    if args.universal is not None:
        e = parse_vector(base, args.universal) if args.universal else []
        L = diagonal_universal_2n(base, e)
        units = subset_products(base, e) if not args.units else parse_vector(base, args.units)
    else:
        L = parse_form(base, args.form)
        units = parse_vector(base, args.units)
    out = rank_lower_bound_run(L, units, args.budget)
    return Result(out.to_json(), out.kind == "SplitsCompleted", f"{out.kind} after {out.splits} splits")


def cmd_represent(args) -> Result:
    base, L = _lattice(args)
    beta = parse_element(base, args.beta)
    r = represent_search(L, beta, exhaustive=not args.non_exhaustive, budget=args.budget)
    found = r.vector is not None
    return Result({"beta": str(beta), **r.to_json()}, found,
                  "represented" if found else ("not represented (proof)" if r.exhaustive else "not found (truncated)"))


# --- heights and descent -------------------------------------------------------------------


def cmd_heights(args) -> Result:
    base = parse_base(args.base)
    if args.elem:
        elems = [base.coerce(parse_element(base, t)) for t in args.elem]
    else:
        rng = random.Random(args.seed)
        elems = []
        while len(elems) < args.random:
            coords = [rng.randint(-args.size, args.size) for _ in range(degree(base))]
            e = Fraction(coords[0]) if base is QQ else base(*coords)
            if e:
                elems.append(e)
    reports = [weil_height(e).to_json() for e in elems]
    ok = all(r["inequality_exact"] for r in reports)
    return Result({"reports": reports}, ok, f"{len(reports)} heights, inequality holds: {ok}")


def cmd_enumerate(args) -> Result:
    base = QuadField(args.D) if args.D else QQ
    found = enumerate_tp_integers(base, Fraction(args.r))
    return Result({"D": args.D, "r": args.r, "count": len(found), "elements": [str(x) for x in found]}, True,
                  f"{len(found)} totally positive integers with house < {args.r}")


def cmd_profile(args) -> Result:
    p = northcott_profile([QuadField(D) for D in _int_list(args.D)], Fraction(args.r))
    out = p.to_json()
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(p.to_csv())
        out["csv"] = args.csv
    return Result(out, True, f"counts {[r['count'] for r in out['rows']]}, total {p.cumulative}")


def cmd_descent(args) -> Result:
    base, L = _lattice(args)
    alpha = parse_element(base, args.alpha)
    if args.step:
        gamma = parse_vector(base, args.gamma) if args.gamma else None
        out = descent_step(L, alpha, gamma)
        return Result({"beta": str(alpha), "step": [str(x) for x in out]}, True, f"{len(out)} shifted elements")
    tr = descent_run(L, alpha, args.max_iter)
    ok = tr.terminated and tr.monotone_above_threshold()
    return Result(tr.to_json(), ok, f"terminated after {len(tr.levels) - 1} iterations, "
                  f"final max house {float(tr.max_houses[-1]):.4g} < {tr.threshold_str}")


def cmd_reproduce(args) -> Result:
    results = run_all()
    ok = all(r.all_checks_passed for r in results)
    failed = [r.scenario for r in results if not r.all_checks_passed]
    return Result({"scenarios": [r.to_json() for r in results], "all_checks_passed": ok}, ok,
                  f"{len(results)} scenarios, failed: {failed or 'none'}")


# --- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def common_options(defaults: bool) -> argparse.ArgumentParser:
        # subcommand copies must not overwrite a value given before the command name
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--seed", type=int, default=d(0), help="seed for randomized inputs")
        c.add_argument("--threads", type=int, default=d(1), help="worker count hint (searches run single-threaded)")
        c.add_argument("--out", default=d(None), help="also write the JSON result to this file")
        return c

    common, sub_common = common_options(True), common_options(False)

    p = argparse.ArgumentParser(prog="unitforge", description="Exact computations with units, square classes, "
                                "quadratic lattices and heights in real multiquadratic fields.", parents=[common])
    p.add_argument("--version", action="version", version=f"unitforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_, parents=[sub_common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("fund-unit", cmd_fund_unit, "fundamental unit (and delta when the norm is 1)")
    sp.add_argument("--D", type=int, required=True)
    sp = add("delta", cmd_delta, "rational square class of the fundamental unit")
    sp.add_argument("--D", type=int, required=True)
    sp = add("pell-report", cmd_pell_report, "consistency of the four negative-Pell conditions")
    sp.add_argument("--D", type=int)
    sp.add_argument("--lo", type=int, default=2)
    sp.add_argument("--hi", type=int, default=100)
    sp = add("sig-rank", cmd_sig_rank, "signature rank of the unit group")
    sp.add_argument("--D", type=int, required=True)
    sp = add("lemma51", cmd_lemma51, "witness e*beta^2 = Tr(e+1) for a norm-1 unit")
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--elem", help="unit of norm 1 (default: the fundamental unit)")

    for name, fn, h in (("biquad-sqrt", cmd_biquad_sqrt, "square root inside Q(sqrt d1, sqrt d2)"),
                        ("cor63", cmd_cor63, "decide alpha in K^2 Q^x for a unit alpha")):
        sp = add(name, fn, h)
        sp.add_argument("--d1", type=int, required=True)
        sp.add_argument("--d2", type=int, required=True)
        sp.add_argument("--elem", required=True)
    sp = add("prop65", cmd_prop65, "verify the unit mu(n) of the n = 1 mod 12 family")
    sp.add_argument("--n", type=int, required=True)

    sp = add("kummer", cmd_kummer, "is a rational a square in a multiquadratic field")
    sp.add_argument("--target", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--basis", help="comma-separated squarefree generators")
    g.add_argument("--family", choices=["Example53", "Example54", "Prop65Family", "AllSquareFree"])
    sp.add_argument("--prefix", type=int, default=3)
    sp = add("family53", cmd_family53, "the n_k family with pairwise coprime 4n^2-1")
    sp.add_argument("--m", type=int, required=True)
    sp = add("family54", cmd_family54, "fields Q(sqrt(q q')) from pairs of primes 3 mod 4")
    sp.add_argument("--primes", required=True, help="comma-separated, even count")
    sp = add("greedy-select", cmd_greedy_select, "greedy selection of disjoint fields from the mu(n) family")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n-max", type=int, default=10**4)
    sp = add("thm72-cert", cmd_thm72_cert, "certificate of m distinct totally positive unit classes")
    sp.add_argument("--m", type=int, required=True)
    sp = add("verify-cert", cmd_verify_cert, "re-verify a certificate from its JSON file")
    sp.add_argument("file")

    def lattice_args(sp, form_required: bool = True) -> None:
        sp.add_argument("--base", default="Q", help="Q, D for Q(sqrt D), or d1,d2")
        sp.add_argument("--form", required=form_required, help="e.g. 'x1^2 + x1*x2 + x2^2' or I4")

    sp = add("lattice-eval", cmd_lattice_eval, "evaluate Q(v) and B(v,w)")
    lattice_args(sp)
    sp.add_argument("--v", required=True)
    sp.add_argument("--w")
    sp = add("lattice-split", cmd_lattice_split, "split off a vector whose value is a unit")
    lattice_args(sp)
    sp.add_argument("--v", required=True)
    sp = add("universal-2n", cmd_universal_2n, "diagonal form with entries the subset products of units")
    sp.add_argument("--base", default="Q")
    sp.add_argument("--units", default="", help="comma-separated totally positive units")
    sp = add("rank-bound", cmd_rank_bound, "replay the rank lower bound induction")
    lattice_args(sp, form_required=False)
    sp.add_argument("--universal", help="use universal-2n on these units instead of --form")
    sp.add_argument("--units", help="units to split off (default with --universal: subset products)")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp = add("represent", cmd_represent, "search for v with Q(v) = beta on a diagonal form")
    lattice_args(sp)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--non-exhaustive", action="store_true")

    sp = add("heights", cmd_heights, "house and Weil height")
    sp.add_argument("--base", default="Q")
    sp.add_argument("--elem", action="append")
    sp.add_argument("--random", type=int, default=10)
    sp.add_argument("--size", type=int, default=50)
    sp = add("enumerate", cmd_enumerate, "totally positive integers with house < r")
    sp.add_argument("--D", type=int)
    sp.add_argument("--r", required=True)
    sp = add("profile", cmd_profile, "per-field counts of totally positive integers with house < r")
    sp.add_argument("--D", required=True, help="comma-separated")
    sp.add_argument("--r", required=True)
    sp.add_argument("--csv", metavar="FILE", help="also write the profile as CSV to FILE")
    sp = add("descent", cmd_descent, "iterate the house descent on a diagonal form")
    lattice_args(sp)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--max-iter", type=int, default=20)
    sp.add_argument("--step", action="store_true", help="run a single step only")
    sp.add_argument("--gamma", help="representation to use with --step")
    add("reproduce-paper", cmd_reproduce, "run every reproduction scenario")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t = time.perf_counter()
    try:
        res = args.func(args)
    except (VerificationError, AssertionError) as exc:
        res = Result({"error": type(exc).__name__, "message": str(exc)}, False, f"verification failed: {exc}")
    except (ValueError, ParseError, ZeroDivisionError) as exc:
        print(f"unitforge {args.command}: {exc}", file=sys.stderr)
        return 2
    except UnitforgeError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        trace = getattr(exc, "trace", None)
        if trace is not None:
            payload["trace"] = trace.to_json()
        res = Result(payload, False, f"{type(exc).__name__}: {exc}")
    res.payload = {"command": args.command, **res.payload, "ok": res.ok,
                   "elapsed": round(time.perf_counter() - t, 4)}
    text = json.dumps(res.payload, indent=2, default=str)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(f"[{'ok' if res.ok else 'FAIL'}] {res.summary}", file=sys.stderr)
    return 0 if res.ok else 1


if __name__ == "__main__":
    sys.exit(main())
