"""Quotient presentation of the cohomology of a blow-up and ring fingerprints.

The ambient ring is ``H(W) (+) H(V) (x) Lambda^+(x)`` with
``(w, v x^i)(w', v' x^j) = (ww', wv' x^j + (-1)^{|w'||v|} w'v x^i + vv' x^{i+j})``,
where ``w`` acts on ``H(V)`` through ``f^*``.  The ideal is generated by
``f_!(v) + sum_{i<k} v c_i x^{k-i}`` and is spanned degreewise, no rewriting.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .algebra import DegreewiseAlgebra, Element, cdga_from_presentation
from .blowup import BlowupModel
from .cohomology import CohomologyRing, cohomology, cup_structure, induced_map
from .errors import InputError, InternalError, PreconditionError
from .linalg import Matrix, RowEchelon, Subspace, kernel_basis, vaxpy, vscale


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


# -- quotients of zero-differential algebras -------------------------------------------------

@dataclass
class QuotientRing:
    """``A / I`` with ``I`` spanned degreewise by ``basis * generator`` products."""
    ambient: DegreewiseAlgebra
    generators: list
    ideal: dict       # degree -> Subspace of A^d
    reps: dict        # degree -> list of ambient vectors spanning a complement
    ring: CohomologyRing
    _ech: dict = field(repr=False, default_factory=dict)

    def coordinates(self, d: int, vec: dict) -> dict:
        """Coordinates of the class of an ambient vector in the quotient basis."""
        rem, comb = self._ech[d].reduce(vec)
        if rem:
            raise InternalError("quotient basis does not span degree %d" % d)
        return {t[1]: c for t, c in comb.items() if t[0] == "q" and c}


def quotient_ring(A: DegreewiseAlgebra, generators, hi: int | None = None, name: str = "") -> QuotientRing:
    """Degreewise quotient of a zero-differential algebra by the ideal spanned by ``generators``."""
    hi = A.hi if hi is None else hi
    if hi > A.hi:
        raise InputError("quotient bound %d exceeds the ambient top degree %d" % (hi, A.hi))
    gens = [g for g in generators if not g.is_zero()]
    for g in gens:
        if g.space is not A:
            raise InputError("ideal generators must live in the ambient algebra")
    ideal, reps, echs, names = {}, {}, {}, {}
    for d in range(hi + 1):
        ech = RowEchelon(A.dim(d))
        span = []
        for g in gens:
            e = d - g.degree
            if e < 0:
                continue
            for b in A.basis_elements(e):
                p = b * g
                if p.coeffs and ech.add(p.coeffs, tag=("i", len(span)))[0]:
                    span.append(dict(p.coeffs))
        ideal[d] = Subspace(A.dim(d), span, check=False)
        reps[d], names[d] = [], []
        for i in range(A.dim(d)):
            if ech.add({i: mpq(1)}, tag=("q", len(reps[d])))[0]:
                reps[d].append({i: mpq(1)})
                names[d].append(A.basis[d][i])
        echs[d] = ech
    q = QuotientRing(A, gens, ideal, reps, None, echs)
    mult = {}
    for d in range(1, hi + 1):
        for e in range(1, hi + 1 - d):
            for i, u in enumerate(reps[d]):
                for j, v in enumerate(reps[e]):
                    p = A.product(Element(A, d, u), Element(A, e, v))
                    c = q.coordinates(d + e, p.coeffs)
                    if c:
                        mult[(d, i, e, j)] = c
    q.ring = CohomologyRing(names, mult, hi, name=name or "quotient")
    return q


def _check_ideal(q: QuotientRing, hi: int) -> None:
    """Every basis element times every ideal vector stays in the ideal."""
    A = q.ambient
    for d in range(hi + 1):
        for v in q.ideal[d].basis:
            x = Element(A, d, v)
            for e in range(1, hi + 1 - d):
                for b in A.basis_elements(e):
                    if not q.ideal[d + e].contains((b * x).coeffs):
                        raise InternalError("ideal is not closed under multiplication in degree %d" % (d + e))


# -- the blow-up presentation --------------------------------------------------------------

def _vname(vname: str, j: int) -> str:
    xp = "x" if j == 1 else "x^%d" % j
    return xp if vname == "1" else "%s*%s" % (vname, xp)


def presentation_ambient(HW: CohomologyRing, HV: CohomologyRing, f_upper: dict, hi: int) -> tuple:
    """``H(W) (+) H(V) (x) Lambda^+(x)`` through degree ``hi``, and its index of basis keys."""
    basis = {t: [] for t in range(hi + 1)}
    index = {}
    for t in range(hi + 1):
        for i in range(HW.dim(t) if t <= HW.hi else 0):
            index[("W", t, i)] = (t, len(basis[t]))
            basis[t].append(HW.names[t][i])
        for j in range(1, t // 2 + 1):
            vd = t - 2 * j
            for i in range(HV.dim(vd) if vd <= HV.hi else 0):
                index[("V", vd, i, j)] = (t, len(basis[t]))
                basis[t].append(_vname(HV.names[vd][i], j))

    def vvec(vd, v, j):
        return {index[("V", vd, i, j)][1]: c for i, c in v.items()
                if ("V", vd, i, j) in index}

    def fw(d, i):
        return f_upper[d][i] if d in f_upper else {}

    mult = {}
    items = list(index.items())
    for (key, (t, ti)) in items:
        if t == 0:
            continue
        for (key2, (u, ui)) in items:
            if u == 0 or t + u > hi:
                continue
            out = {}
            if key[0] == "W" and key2[0] == "W":
                _, d, i = key
                _, e, j = key2
                if d + e <= HW.hi:
                    out = {index[("W", d + e, k)][1]: c for k, c in HW.basis_mul(d, i, e, j).items()}
            elif key[0] == "W":
                _, d, i = key
                _, vd, vi, j = key2
                prod = HV.mul(d, fw(d, i), vd, {vi: 1}) if d + vd <= HV.hi else {}
                out = vvec(d + vd, prod, j)
            elif key2[0] == "W":
                _, vd, vi, j = key
                _, e, wi = key2
                prod = HV.mul(e, fw(e, wi), vd, {vi: 1}) if e + vd <= HV.hi else {}
                out = vscale(vvec(e + vd, prod, j), _sgn(e * vd))
            else:
                _, vd, vi, j = key
                _, ed, ei, j2 = key2
                if vd + ed <= HV.hi:
                    out = vvec(vd + ed, HV.basis_mul(vd, vi, ed, ei), j + j2)
            if out:
                mult[(t, ti, u, ui)] = out
    A = DegreewiseAlgebra(basis, mult, None, truncated=True, name="H(W)+H(V)xL(x)", check=False)
    return A, index


@dataclass
class BlowupPresentation:
    """Inputs, ambient ring, ideal and the quotient ring."""
    HW: CohomologyRing
    HV: CohomologyRing
    f_upper: dict     # d -> list of HV^d coordinates, one per HW^d basis class
    f_lower: dict     # d -> list of HW^{d+2k} coordinates, one per HV^d basis class
    chern: list       # c_i as HV^{2i} coordinates, i < k
    k: int
    n: int
    ambient: DegreewiseAlgebra
    index: dict
    quotient: QuotientRing

    @property
    def ring(self) -> CohomologyRing:
        return self.quotient.ring

    @property
    def ideal_basis(self) -> dict:
        return self.quotient.ideal

    def generator_strings(self) -> list[str]:
        return [repr(g) for g in self.quotient.generators]


def blowup_presentation(HW: CohomologyRing, HV: CohomologyRing, f_upper: dict, f_lower: dict,
                        chern: list, k: int, n: int) -> BlowupPresentation:
    """``(H(W) (+) H(V) (x) Lambda^+(x)) / I`` computed through degree ``n``."""
    if k < 2:
        raise PreconditionError("presentation needs k >= 2 (got k = %d)" % k)
    if len(chern) != k or chern[0] != {0: 1}:
        raise InputError("need c_0 = 1, ..., c_{k-1}")
    m = max((d for d in range(HV.hi + 1) if HV.dim(d)), default=0)
    if HW.dim(n) != 1 or HV.dim(m) != 1:
        raise PreconditionError("H(W) and H(V) must have one-dimensional top degree")
    if not f_lower.get(m, [{}])[0]:
        raise PreconditionError("f_! does not send the top class of V to the top class of W")
    hi = n + 2
    A, index = presentation_ambient(HW, HV, f_upper, hi)
    gens = []
    for vd in range(HV.hi + 1):
        for vi in range(HV.dim(vd)):
            deg = vd + 2 * k
            if deg > hi:
                continue
            out = {}
            for wi, c in f_lower.get(vd, [{}] * HV.dim(vd))[vi].items():
                vaxpy(out, {index[("W", deg, wi)][1]: mpq(1)}, c)
            for i, ci in enumerate(chern):
                prod = HV.mul(vd, {vi: 1}, 2 * i, ci) if vd + 2 * i <= HV.hi else {}
                for t, c in prod.items():
                    key = ("V", vd + 2 * i, t, k - i)
                    if key in index:
                        vaxpy(out, {index[key][1]: mpq(1)}, c)
            gens.append(Element(A, deg, out))
    q = quotient_ring(A, gens, hi, name="presentation")
    high = [d for d in range(n + 1, hi + 1) if q.ring.dim(d)]
    if high:
        raise InternalError("quotient does not vanish above degree %d (degree %d survives)" % (n, high[0]))
    _check_ideal(q, hi)
    # restrict the quotient ring to 0..n
    qr = q.ring
    q.ring = CohomologyRing({d: qr.names[d] for d in range(n + 1)},
                            {key: v for key, v in qr.mult.items() if key[0] + key[2] <= n}, n,
                            formal_dimension=n, name="presentation")
    fails = q.ring.check()
    if fails:
        raise InternalError("quotient ring is inconsistent: %s" % fails[0])
    return BlowupPresentation(HW, HV, f_upper, f_lower, chern, k, n, A, index, q)


def _coords(v) -> dict:
    return {i: c for i, c in enumerate(v) if c}


def presentation_inputs(bm: BlowupModel) -> dict:
    """Cohomological inputs of the presentation read off a blow-up model."""
    e = bm.embedding
    HW = cup_structure(e.R, (0, e.n), formal_dimension=e.n)
    HV = cup_structure(e.Q, (0, e.Q.hi), formal_dimension=e.m)
    HRc = cohomology(e.R, (0, e.n))
    f_upper = {}
    for d in range(HV.hi + 1):
        if d > e.n:
            break
        cols = induced_map(e.phi, d, HRc, cohomology(e.Q, (d, d)))
        f_upper[d] = [{r: c for r, c in col.items()} for col in cols.columns()] if cols.ncols else []
        f_upper[d] += [{}] * (HW.dim(d) - len(f_upper[d]))
    M = e.source_module
    f_lower = {}
    for d in range(HV.hi + 1):
        rows = []
        for rep in HV.reps[d]:
            img = bm.shriek.apply(Element(M, d + e.r, rep.coeffs))
            rows.append(_coords(HRc.coordinates(Element(e.R, img.degree, img.coeffs)))
                        if d + e.r <= e.n else {})
        f_lower[d] = rows
    chern = [_coords(cohomology(e.Q, (2 * i, 2 * i)).coordinates(g)) if not g.is_zero() else {}
             for i, g in enumerate(bm.chern.gamma)]
    chern[0] = {0: 1}
    return dict(HW=HW, HV=HV, f_upper=f_upper, f_lower=f_lower, chern=chern, k=bm.k, n=e.n)


def presentation_from_model(bm: BlowupModel, chern: list | None = None) -> BlowupPresentation:
    """The presentation built from the same inputs as ``bm``; ``chern`` overrides the classes."""
    data = presentation_inputs(bm)
    if chern is not None:
        data["chern"] = chern
    return blowup_presentation(**data)


# -- fingerprints ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingFingerprint:
    """Basis-free invariants: Betti numbers, cup-product ranks and annihilator dimensions."""
    betti: tuple
    cup_ranks: tuple      # ((d, e), rank) for 1 <= d <= e, d + e <= hi
    annihilators: tuple   # dim of {h in H^d : h H^+ = 0}

    def as_dict(self) -> dict:
        return {"betti": list(self.betti),
                "cup_ranks": {"%d,%d" % de: r for de, r in self.cup_ranks},
                "annihilators": list(self.annihilators)}

    def first_difference(self, other: "RingFingerprint"):
        """Smallest degree where the fingerprints differ, or None."""
        hi = max(len(self.betti), len(other.betti))
        for t in range(hi):
            if _at(self.betti, t) != _at(other.betti, t):
                return t
            mine = {de: r for de, r in self.cup_ranks if sum(de) == t}
            theirs = {de: r for de, r in other.cup_ranks if sum(de) == t}
            if mine != theirs:
                return t
            if _at(self.annihilators, t) != _at(other.annihilators, t):
                return t
        return None


def _at(seq, t):
    return seq[t] if t < len(seq) else 0


def fingerprint(ring: CohomologyRing, hi: int | None = None) -> RingFingerprint:
    hi = ring.hi if hi is None else min(hi, ring.hi)
    betti = tuple(ring.dim(d) for d in range(hi + 1))
    ranks = []
    for d in range(1, hi + 1):
        for e in range(d, hi + 1 - d):
            if ring.dim(d) and ring.dim(e):
                ranks.append(((d, e), ring.product_matrix(d, e).rank()))
    ann = []
    for d in range(hi + 1):
        cols = []
        for i in range(ring.dim(d)):
            col = {}
            off = 0
            for e in range(1, hi + 1 - d):
                for j in range(ring.dim(e)):
                    for t, c in ring.basis_mul(d, i, e, j).items():
                        col[off + t] = c
                    off += ring.dim(d + e)
            cols.append(col)
        rows = max((max(c) + 1 for c in cols if c), default=0)
        M = Matrix.from_columns(rows, cols) if cols else Matrix(0, 0)
        ann.append(ring.dim(d) - M.rank())
    return RingFingerprint(betti, tuple(ranks), tuple(ann))


# -- comparison with the direct computation ---------------------------------------------------

@dataclass
class CrossCheck:
    ok: bool
    betti_equal: bool
    cup_ranks_equal: bool
    canonical_map: bool | None
    first_difference: int | None
    messages: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "betti_equal": self.betti_equal, "cup_ranks_equal": self.cup_ranks_equal,
                "canonical_map": self.canonical_map, "first_difference": self.first_difference,
                "messages": list(self.messages)}


def compare_with_direct(p: BlowupPresentation, bm: BlowupModel, canonical: bool = True) -> CrossCheck:
    """Compare the quotient with ``H(B(R, Q))`` degree by degree.

    Dimensions and cup-rank profiles must agree.  When ``canonical`` is set
    the natural map ``w -> [iota w]``, ``v x^j -> [v x^j]`` is also checked to
    kill the ideal and to be a multiplicative bijection from the quotient;
    this needs the presentation to come from the model's own representatives.
    """
    n = p.n
    direct = bm.ring()
    fa, fb = fingerprint(p.ring, n), fingerprint(direct, n)
    msgs = []
    betti_eq = fa.betti == fb.betti
    ranks_eq = fa.cup_ranks == fb.cup_ranks
    first = fa.first_difference(fb)
    if not betti_eq:
        msgs.append("betti differ: presentation %s, direct %s" % (list(fa.betti), list(fb.betti)))
    if not ranks_eq:
        diff = [de for (de, r), (de2, r2) in zip(fa.cup_ranks, fb.cup_ranks) if r != r2 or de != de2]
        msgs.append("cup ranks differ at %s" % (diff[:3],))
    canon = None
    same = p.HW.source is bm.embedding.R and p.HV.source is bm.embedding.Q
    if canonical and not same:
        msgs.append("canonical map skipped: presentation was built from other cochain models")
    if canonical and same:
        canon, t, why = _canonical_map(p, bm)
        if not canon:
            msgs.append(why)
            if first is None or (t is not None and t < first):
                first = t
    ok = betti_eq and ranks_eq and canon is not False
    return CrossCheck(ok, betti_eq, ranks_eq, canon, None if ok else first, msgs)


def _canonical_map(p: BlowupPresentation, bm: BlowupModel):
    e = bm.embedding
    direct = bm.ring()
    B = bm.algebra
    H = cohomology(B, (0, bm.N - 1))
    A = p.ambient

    def phi_vec(d, vec):
        out = {}
        for t, c in vec.items():
            vaxpy(out, images[d][t], c)
        return out

    images = {}
    for d in range(p.n + 1):
        rows = []
        for i in range(A.dim(d)):
            rows.append(None)
        for key, (t, ti) in p.index.items():
            if t != d:
                continue
            if key[0] == "W":
                x = bm.iota.apply(p.HW.reps[key[1]][key[2]])
            else:
                _, vd, vi, j = key
                x = bm.lift(p.HV.reps[vd][vi], j)
            rows[ti] = _coords(H.coordinates(x))
        images[d] = rows
    for d in range(p.n + 1):
        for v in p.quotient.ideal[d].basis:
            if phi_vec(d, v):
                return False, d, "canonical map does not kill the ideal in degree %d" % d
        cols = [phi_vec(d, r) for r in p.quotient.reps[d]]
        if len(cols) != direct.dim(d) or Matrix.from_columns(direct.dim(d), cols).rank() != len(cols):
            return False, d, "canonical map is not bijective in degree %d" % d
    qr = p.ring
    for d in range(1, p.n + 1):
        for e_ in range(1, p.n + 1 - d):
            for i, u in enumerate(p.quotient.reps[d]):
                for j, v in enumerate(p.quotient.reps[e_]):
                    lhs = {}
                    for t, c in qr.basis_mul(d, i, e_, j).items():
                        vaxpy(lhs, phi_vec(d + e_, p.quotient.reps[d + e_][t]), c)
                    rhs = direct.mul(d, phi_vec(d, u), e_, phi_vec(e_, v))
                    if lhs != rhs:
                        return False, d + e_, "canonical map is not multiplicative in degree %d" % (d + e_)
    return True, None, ""


# -- the CP(5) / CP(1) family -----------------------------------------------------------------

def cp5_relations(l: int) -> list[str]:
    """Relations of ``Lambda(a, x)`` presenting the blow-up of CP(5) along ``f_l(CP(1))``."""
    if l < 1:
        raise InputError("l must be a positive integer")
    return ["a^6", "a^2*x", "%d*a^4 + %d*a*x^3 + %d*x^4" % (l * l, 6 * l - 2, l)]


def cp5_second_model(l: int) -> CohomologyRing:
    """``Lambda(a, x) / (a^6, a^2 x, l^2 a^4 + (6l-2) a x^3 + l x^4)`` through degree 10."""
    rels = cp5_relations(l)
    free = cdga_from_presentation([("a", 2), ("x", 2)], {}, [], 12, name="L(a,x)", check=False)
    q = quotient_ring(free, [free.element(r) for r in rels], 12, name="second model l=%d" % l)
    if any(q.ring.dim(d) for d in (11, 12)):
        raise InternalError("second model does not vanish above degree 10")
    r = q.ring
    return CohomologyRing({d: r.names[d] for d in range(11)},
                          {k: v for k, v in r.mult.items() if k[0] + k[2] <= 10}, 10,
                          formal_dimension=10, name=r.name)


def cp5_blowup_presentation(l: int) -> BlowupPresentation:
    """The presentation for ``f_l: CP(1) -> CP(5)``, ``f_l^*(a) = l a'``, ``c_1(nu) = (6l-2) a'``."""
    from .corpus import cp5_family
    from .blowup import blowup_model
    ex = cp5_family(l)
    bm = blowup_model(ex.embedding, ex.shriek(), ex.chern)
    return presentation_from_model(bm)


def cp5_separating_invariant(l) -> mpq:
    """``(6l - 2)^4 / l^5``, a rational homotopy invariant of the family member."""
    l = mpq(l)
    if l < 1:
        raise InputError("l must be >= 1")
    return (6 * l - 2) ** 4 / l ** 5
