"""Command-line interface: ``cdga-blowup {cohomology,blowup,massey,verify}``.

Exit codes: 0 success, 2 validation error, 3 hypothesis violation,
4 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from math import comb

from gmpy2 import mpq

from . import __version__
from . import expr as _expr
from .algebra import DegreewiseAlgebra, Element, validate
from .blowup import (EmbeddingModel, SymplecticEmbeddingData, ChernData, betti_additivity, blowup_model,
                     chern_normal, leray_hirsch_dims, projectivization_model, shriek_cpn, shriek_solve)
from .cohomology import cohomology, cup_structure, massey_triple, poincare_check
from .corpus import cp
from .errors import CdgaError, InputError, InternalError, PreconditionError
from .io import load_model, load_presentation, save_model
from .linalg import fmt
from .modules import algebra_map, homotopy_between

EXIT_OK, EXIT_VALIDATION, EXIT_HYPOTHESIS, EXIT_INTERNAL = 0, 2, 3, 4


# -- helpers -----------------------------------------------------------------------------

def _window(text: str | None):
    if text is None:
        return None
    lo, sep, hi = text.partition("..")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise InputError("window must look like a..b, got %r" % text) from None


def evaluate(A: DegreewiseAlgebra, text: str, constants: dict | None = None,
             symbols: dict | None = None) -> dict:
    """Evaluate a possibly inhomogeneous expression; returns degree -> Element.

    ``symbols`` binds extra names (such as ``omega``) to elements of ``A``.
    """
    symbols = symbols or {}
    out = {}
    for c, word in _expr.parse(text, constants):
        if any(s in symbols for s in word):
            term = A.unit_element()
            for s in word:
                term = term * (symbols[s] if s in symbols else A.element(s))
        else:
            term = A._word_element(word)
        term = c * term
        if term.is_zero():
            continue
        out[term.degree] = out[term.degree] + term if term.degree in out else term
    return out


def _homogeneous(A, text, constants=None, symbols=None) -> Element:
    parts = evaluate(A, text, constants, symbols)
    if len(parts) > 1:
        raise InputError("expression %r is not homogeneous" % text)
    if not parts:
        raise InputError("expression %r is zero" % text)
    return next(iter(parts.values()))


def _ring_dict(ring) -> dict:
    products = []
    for (d, i, e, j), v in sorted(ring.mult.items()):
        if (e, j) < (d, i):
            continue
        val = " + ".join("%s*%s" % (fmt(c), ring.names[d + e][t]) for t, c in sorted(v.items()))
        products.append([ring.names[d][i], ring.names[e][j], val])
    return {"basis": {str(d): list(ring.names[d]) for d in range(ring.hi + 1) if ring.dim(d)},
            "products": products}


def _pd_dict(ring, n):
    if n is None or n > ring.hi or ring.dim(n) != 1:
        return None
    res = poincare_check(ring, n)
    return {"n": n, "ok": res.ok, "failures": res.failures}


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
        return
    for key, val in report.items():
        if isinstance(val, dict):
            out.write("%s:\n" % key)
            for k2, v2 in val.items():
                out.write("  %s: %s\n" % (k2, json.dumps(v2, ensure_ascii=False)))
        else:
            out.write("%s: %s\n" % (key, json.dumps(val, ensure_ascii=False)))


# -- cohomology ------------------------------------------------------------------------

def cmd_cohomology(args) -> dict:
    pf = load_presentation(args.file)
    A = pf.build()
    window = _window(args.window) or (0, A.valid_hi)
    H = cohomology(A, window)
    report = {"command": "cohomology",
              "inputs": {"file": args.file, "name": pf.name, "window": list(window)},
              "dims": [A.dim(d) for d in A.degrees()],
              "betti": H.betti}
    n = None
    if "orientation" in pf.distinguished:
        n = A.element(pf.distinguished["orientation"]).degree
    elif not A.truncated:
        n = max((d for d in A.degrees() if A.dim(d)), default=0)
    if window[0] == 0:
        ring = cup_structure(A, (0, window[1]))
        if args.ring:
            report["ring"] = _ring_dict(ring)
        report["poincare_duality"] = _pd_dict(ring, n)
    return report


# -- blow-up ----------------------------------------------------------------------------

def _ambient(text: str):
    if text.startswith("cp:"):
        try:
            N = int(text[3:])
        except ValueError:
            raise InputError("ambient must be cp:N or a file, got %r" % text) from None
        R = cp(N)
        chern = " + ".join("%d*a^%d" % (comb(N + 1, j), j) for j in range(1, N + 1))
        return R, {"orientation": "a^%d" % N, "symplectic_form": "a", "chern": "1 + " + chern}, "CP(%d)" % N
    pf = load_presentation(text)
    return pf.build(), pf.distinguished, pf.name


def _parse_embed(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        g, sep, img = part.partition("->")
        if not sep:
            raise InputError("embedding must be written gen->expr, got %r" % part)
        out[g.strip()] = img.strip()
    return out


def build_blowup(args):
    R, dR, rname = _ambient(args.ambient)
    sub = load_presentation(args.sub)
    Q = sub.build()
    dQ = sub.distinguished
    constants = {"l": mpq(args.l)} if args.l is not None else {}
    symbols = {}
    if "symplectic_form" in dQ:
        symbols["omega"] = _homogeneous(Q, dQ["symplectic_form"], constants)
    images = {g: _homogeneous(Q, img, constants, symbols) for g, img in _parse_embed(args.embed).items()}
    phi = algebra_map(R, Q, images)
    for label, d in (("ambient", dR), ("submanifold", dQ)):
        if "orientation" not in d:
            raise InputError("%s needs a distinguished orientation" % label)
    u_W = _homogeneous(R, dR["orientation"])
    u_V = _homogeneous(Q, dQ["orientation"])
    e = EmbeddingModel(R, Q, phi, u_W.degree, u_V.degree, u_W, u_V)
    e.check_blowup()
    k = e.k
    if args.chern is not None:
        parts = evaluate(Q, args.chern, constants, symbols)
        one = Q.unit_element()
        if parts.get(0) != one:
            raise InputError("normal Chern class must start with 1")
        gamma = [parts.get(2 * i, Q.zero(2 * i)) for i in range(k)]
        chern = ChernData(k, gamma)
    elif args.chern_auto:
        if "chern" not in dR or "chern" not in dQ:
            raise InputError("--chern-auto needs the total Chern class of ambient and submanifold")
        cW = evaluate(R, dR["chern"])
        pulled = [phi.apply(t) for t in cW.values()]
        cV = list(evaluate(Q, dQ["chern"], constants, symbols).values())
        chern = chern_normal(cV, pulled, e.m, k, Q)
    else:
        raise InputError("give --chern or --chern-auto")
    mode = args.shriek
    symp = None
    if mode in ("auto", "cpn") and "omega" in symbols:
        try:
            symp = SymplecticEmbeddingData(Q, phi.apply(R.element(R.generators[0][0])), u_V,
                                           mpq(args.l_M) if args.l_M is not None else None)
            shriek = shriek_cpn(e, symp)
        except (PreconditionError, InputError):
            if mode == "cpn":
                raise
            symp = None
    if symp is None:
        if mode == "cpn":
            raise PreconditionError("closed-form shriek map needs a symplectic submanifold of CP(N)")
        shriek = shriek_solve(e)
    bm = blowup_model(e, shriek, chern, args.top)
    names = {"ambient": rname, "sub": sub.name}
    return bm, symp, names


def cmd_blowup(args) -> dict:
    from .presentation import compare_with_direct, presentation_from_model
    bm, symp, names = build_blowup(args)
    e = bm.embedding
    ring = bm.ring()
    H = cohomology(bm.algebra, (0, bm.N - 1))
    report = {"command": "blowup",
              "inputs": {"ambient": args.ambient, "sub": args.sub, "embed": args.embed,
                         "chern": args.chern if args.chern is not None else "auto",
                         "l": args.l, "shriek": "closed form" if symp is not None else "solved"},
              "n": e.n, "m": e.m, "k": e.k,
              "l_M": fmt(symp.l_M) if symp is not None else None,
              "normal_chern": [repr(g) for g in bm.chern.gamma],
              "dims": [bm.algebra.dim(d) for d in bm.algebra.degrees()],
              "betti": H.betti,
              "betti_expected": betti_additivity(e, bm.N - 1)}
    if args.ring:
        report["ring"] = _ring_dict(ring)
    report["poincare_duality"] = _pd_dict(ring, e.n)
    cc = compare_with_direct(presentation_from_model(bm), bm)
    report["cross_check"] = cc.as_dict()
    if args.out:
        meta = {"ambient": names["ambient"], "sub": names["sub"], "n": e.n, "k": e.k}
        save_model(bm.algebra, args.out, meta)
        report["saved"] = args.out
    return report


# -- Massey ----------------------------------------------------------------------------

def cmd_massey(args) -> dict:
    if args.model.endswith(".json"):
        A, meta = load_model(args.model)
    else:
        A, meta = load_presentation(args.model).build(), {}
    classes = [c.strip() for c in args.classes.split(",")]
    if len(classes) != 3:
        raise InputError("--classes needs exactly three expressions")
    a, b, c = (_homogeneous(A, t) for t in classes)
    rep = massey_triple(A, a, b, c)
    out = rep.as_dict()
    out["nontrivial"] = rep.nontrivial
    return {"command": "massey", "inputs": {"model": args.model, "classes": classes}, "massey": out}


# -- verify ----------------------------------------------------------------------------

def _verify_mcduff() -> dict:
    from .corpus import mcduff
    from .presentation import compare_with_direct, presentation_from_model
    ex = mcduff()
    bm = blowup_model(ex.embedding, ex.shriek(), ex.chern)
    ring = bm.ring()
    B = bm.algebra
    rep = massey_triple(B, B.element("u*x"), B.element("y*x"), B.element("y*x"))
    target = cohomology(B, (8, 8)).coordinates(B.element("v*y*x^3"))
    checks = {
        "validate": validate(B).ok,
        "betti": ring.betti[:13] == betti_additivity(ex.embedding, 12),
        "vanishes_above_12": all(ring.dim(d) == 0 for d in range(13, ring.hi + 1)),
        "poincare_duality": poincare_check(ring, 12).ok,
        "massey_nontrivial": rep.nontrivial,
        "massey_representative": [str(x) for x in rep.representative_class] == [fmt(x) for x in target],
        "cross_check": compare_with_direct(presentation_from_model(bm), bm).ok,
    }
    return {"betti": ring.betti, "massey": rep.as_dict(), "checks": checks}


def _verify_cp5() -> dict:
    from .corpus import cp5_family
    from .presentation import (compare_with_direct, cp5_second_model, cp5_separating_invariant,
                               fingerprint, presentation_from_model)
    inv = [cp5_separating_invariant(l) for l in range(1, 11)]
    checks = {"invariants_distinct": len(set(inv)) == len(inv)}
    betti, prints = [], []
    for l in range(1, 6):
        ex = cp5_family(l)
        bm = blowup_model(ex.embedding, ex.shriek(), ex.chern)
        p = presentation_from_model(bm)
        checks["cross_check_l%d" % l] = compare_with_direct(p, bm).ok
        checks["second_model_l%d" % l] = fingerprint(cp5_second_model(l)) == fingerprint(p.ring)
        betti.append(p.ring.betti)
        prints.append(fingerprint(p.ring))
    checks["betti_additivity"] = all(b == betti_additivity(ex.embedding, 10) for b in betti)
    return {"invariants": [fmt(x) for x in inv], "betti": betti,
            "fingerprints_equal": all(f == prints[0] for f in prints), "checks": checks}


def _verify_axioms(seed: int = 0, count: int = 100) -> dict:
    from .fuzz import random_chern, random_presentation
    from .modules import DgModule, mapping_cone, suspension, Morphism
    rng = random.Random(seed)
    fails = 0
    for _ in range(count):
        A = random_presentation(rng).build(check=False)
        if not validate(A).ok:
            fails += 1
    lh = 0
    for _ in range(10):
        Q = random_presentation(rng, finite=True, max_gens=3).build()
        top = max(d for d in Q.degrees() if Q.dim(d))
        k = max(1, (top + 3) // 2)
        pm = projectivization_model(Q, random_chern(Q, k, rng))
        hi = pm.total.hi - 1
        lh += cohomology(pm.total, (0, hi)).betti != leray_hirsch_dims(Q, k, hi)
    M = DgModule.regular(cp(2))
    susp = all(suspension(M, k).validate().ok for k in range(-8, 9))
    cone = mapping_cone(Morphism.identity(M))
    acyclic = all(x == 0 for x in cohomology(cone, (cone.lo + 1, cone.hi - 1)).betti)
    return {"checks": {"validate_fuzz": fails == 0, "leray_hirsch": lh == 0,
                       "suspension_signs": susp, "cone_of_identity_acyclic": acyclic},
            "fuzz_cases": count}


def cmd_verify(args) -> dict:
    suites = {"mcduff": _verify_mcduff, "cp5-family": _verify_cp5, "axioms": _verify_axioms}
    body = suites[args.suite]()
    body["ok"] = all(body["checks"].values())
    return {"command": "verify", "suite": args.suite, **body}


# -- entry point ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdga-blowup", description="Exact CDGA models of symplectic blow-ups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cohomology", help="Betti numbers and cup products of a presentation file")
    c.add_argument("file")
    c.add_argument("--window", help="degree range a..b")
    c.add_argument("--ring", action="store_true", help="include structure constants")
    c.add_argument("--json", action="store_true")

    b = sub.add_parser("blowup", help="build the blow-up model of an embedding")
    b.add_argument("--ambient", required=True, help="presentation file or cp:N")
    b.add_argument("--sub", required=True, help="presentation file of the submanifold")
    b.add_argument("--embed", required=True, help='images of ambient generators, e.g. "a->omega"')
    ch = b.add_mutually_exclusive_group()
    ch.add_argument("--chern", help="total Chern class of the normal bundle")
    ch.add_argument("--chern-auto", action="store_true", help="c(nu) = f*c(W) / c(V)")
    b.add_argument("--l_M", "--l-M", dest="l_M", help="expected [omega^m] / [u_V]")
    b.add_argument("--l", help="value of the constant l in expressions")
    b.add_argument("--shriek", choices=("auto", "cpn", "solve"), default="auto")
    b.add_argument("--top", type=int, help="top degree N of the model (default n + 2)")
    b.add_argument("--ring", action="store_true", help="include structure constants")
    b.add_argument("--out", help="save the model as JSON")
    b.add_argument("--json", action="store_true")

    m = sub.add_parser("massey", help="triple Massey product in a saved model or presentation")
    m.add_argument("model")
    m.add_argument("--classes", required=True, help='three comma separated cocycles, e.g. "u*x, y*x, y*x"')
    m.add_argument("--json", action="store_true")

    v = sub.add_parser("verify", help="run a built-in verification suite")
    v.add_argument("suite", choices=("mcduff", "cp5-family", "axioms"))
    v.add_argument("--json", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"cohomology": cmd_cohomology, "blowup": cmd_blowup, "massey": cmd_massey, "verify": cmd_verify}
    start = time.perf_counter()
    try:
        report = handlers[args.command](args)
    except CdgaError as exc:
        kind = {EXIT_VALIDATION: "validation error", EXIT_HYPOTHESIS: "hypothesis violation",
                EXIT_INTERNAL: "internal error"}.get(exc.exit_code, "error")
        sys.stderr.write("%s: %s\n" % (kind, exc))
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - last resort
        sys.stderr.write("internal error: %r\n" % (exc,))
        return EXIT_INTERNAL
    report["timing_s"] = round(time.perf_counter() - start, 3)
    _emit(report, args.json)
    if args.command == "verify" and not report["ok"]:
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
