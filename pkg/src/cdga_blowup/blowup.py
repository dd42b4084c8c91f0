"""Shriek maps, complement and projectivization models, and the blow-up CDGA.

Conventions: ``n`` and ``m`` are the real dimensions of the ambient manifold
W and the submanifold V, ``r = n - m`` the codimension and ``k = r / 2`` the
complex rank of the normal bundle.  The shriek map is a degree 0 R-linear map
``s^{-r} Q -> R``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .algebra import DegreewiseAlgebra, Element, free_extension, validate
from .cohomology import CohomologyRing, cohomology, cup_structure
from .errors import HypothesisError, InputError, InternalError, PreconditionError
from .linalg import Matrix, RowEchelon, Subspace, solve, vaxpy, vscale
from .modules import (DgModule, MapSpace, Morphism, _solve_rows, algebra_map, semi_trivial_cone_cdga,
                      suspension)


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


def _top_nonzero(A) -> int:
    return max((d for d in A.degrees() if A.dim(d)), default=0)


# -- inputs ----------------------------------------------------------------------------

@dataclass
class EmbeddingModel:
    """A model ``phi: R -> Q`` of an embedding ``V^m -> W^n`` with orientation cocycles."""
    R: DegreewiseAlgebra
    Q: DegreewiseAlgebra
    phi: Morphism
    n: int
    m: int
    u_W: Element
    u_V: Element
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def r(self) -> int:
        return self.n - self.m

    @property
    def k(self) -> int:
        return self.r // 2

    def check_models(self) -> None:
        """Truncation and orientation hypotheses needed for the shriek map."""
        R, Q = self.R, self.Q
        if self.phi.source is not R or self.phi.target is not Q or self.phi.kind != "algebra":
            raise InputError("phi must be an algebra map R -> Q")
        if self.m < 0 or self.n < self.m:
            raise InputError("need 0 <= dim V <= dim W")
        if R.truncated or any(R.dim(d) for d in range(self.n + 1, R.hi + 1)):
            raise PreconditionError("R^{>=n+1} must vanish (R has to be a finite model of dimension %d)" % self.n)
        if Q.truncated or any(Q.dim(d) for d in range(self.m + 2, Q.hi + 1)):
            raise PreconditionError("Q^{>=m+2} must vanish (Q has to be a finite model, m = %d)" % self.m)
        for label, A, u, top in (("W", R, self.u_W, self.n), ("V", Q, self.u_V, self.m)):
            if u.space is not A or (not u.is_zero() and u.degree != top):
                raise InputError("orientation u_%s must be a degree %d element of its model" % (label, top))
            H = cohomology(A, (top, top))
            if H.dim(top) != 1:
                raise PreconditionError("dim H^%d = %d for %s, expected 1" % (top, H.dim(top), label))
            if u.is_zero() or H.is_coboundary(u):
                raise PreconditionError("u_%s does not span top cohomology" % label)

    def check_blowup(self) -> None:
        """Hypotheses of the blow-up theorem."""
        self.check_models()
        if self.r % 2:
            raise HypothesisError("odd codimension %d: the normal bundle must be complex" % self.r)
        if self.n < 2 * self.m + 3:
            raise HypothesisError("stable range violated: need dim W ≥ 2 dim V + 3 (dim W = %d, dim V = %d)"
                                  % (self.n, self.m))
        H1R = cohomology(self.R, (1, 1))
        H1Q = cohomology(self.Q, (1, 1))
        from .cohomology import induced_map
        if induced_map(self.phi, 1, H1R, H1Q).rank() != H1R.dim(1):
            raise HypothesisError("H^1(f) is not injective")

    # R-modules shared by every shriek map of this embedding
    @property
    def source_module(self) -> DgModule:
        if "src" not in self._cache:
            self._cache["src"] = suspension(DgModule.restriction(self.phi), -self.r)
        return self._cache["src"]

    @property
    def target_module(self) -> DgModule:
        if "tgt" not in self._cache:
            self._cache["tgt"] = DgModule.regular(self.R)
        return self._cache["tgt"]

    def epsilon(self) -> dict:
        """Functional on R^n with eps(u_W) = 1 and eps(d R^{n-1}) = 0."""
        H = cohomology(self.R, (self.n, self.n))
        cw = H.coordinates(self.u_W)[0]
        out = {}
        for i in range(self.R.dim(self.n)):
            c = H.coordinates(self.R.basis_element(self.n, i))[0]
            if c:
                out[i] = c / cw
        return out


@dataclass
class ChernData:
    """Cocycles ``gamma[i]`` in ``Q^{2i}`` representing ``c_i`` of the normal bundle, ``i < k``."""
    k: int
    gamma: list

    def __post_init__(self):
        if self.k < 1 or len(self.gamma) != self.k:
            raise InputError("need exactly k = %d Chern representatives" % self.k)
        g0 = self.gamma[0]
        if g0.degree != 0 or g0.coeffs != {0: 1}:
            raise InputError("gamma[0] must be the unit")
        for i, g in enumerate(self.gamma):
            if g.is_zero():
                continue
            if g.degree != 2 * i:
                raise InputError("gamma[%d] has degree %d, expected %d" % (i, g.degree, 2 * i))
            if g.degree + 1 <= g.space.hi and not g.d().is_zero():
                raise InputError("gamma[%d] is not a cocycle" % i)


@dataclass
class SymplecticEmbeddingData:
    """``omega`` in ``Q^2`` with ``[omega^m] = l_M [u]`` in top degree ``2m``."""
    Q: DegreewiseAlgebra
    omega: Element
    u: Element
    l_M: mpq | None = None

    def __post_init__(self):
        if self.omega.space is not self.Q or self.omega.degree != 2:
            raise InputError("omega must be a degree 2 element of Q")
        if not self.omega.d().is_zero():
            raise InputError("omega is not a cocycle")
        top = self.u.degree
        if top % 2:
            raise InputError("symplectic submanifold must have even dimension")
        self.m = top // 2
        H = cohomology(self.Q, (top, top))
        wm = self.Q.power(self.omega, self.m)
        cu = H.coordinates(self.u)
        cw = H.coordinates(wm) if not wm.is_zero() else [mpq(0)] * len(cu)
        if len(cu) != 1 or not cu[0]:
            raise PreconditionError("u does not span H^%d" % top)
        if not cw[0]:
            raise PreconditionError("[omega^%d] = 0" % self.m)
        l = cw[0] / cu[0]
        if self.l_M is not None and mpq(self.l_M) != l:
            raise InputError("[omega^%d] = %s [u], not %s [u]" % (self.m, l, self.l_M))
        self.l_M = l


# -- shriek maps -------------------------------------------------------------------------

def shriek_solve(e: EmbeddingModel, order=None, seed: int | None = None) -> Morphism:
    """An R-linear chain map ``s^{-r}Q -> R`` sending ``s^{-r}[u_V]`` to ``[u_W]``.

    One linear system: R-linearity, the chain condition and the normalization
    ``eps(F(s^{-r} u_V)) = 1``.  ``order`` (or a random permutation drawn from
    ``seed``) fixes the pivot order of the unknowns.
    """
    e.check_models()
    M, T = e.source_module, e.target_module
    S = MapSpace(M, T, 0)
    rows = S.linearity_rows()
    rhs = [0] * len(rows)
    for row, _ in S.chain_rows():
        rows.append(row)
        rhs.append(0)
    eps = e.epsilon()
    norm = {}
    for q, c in e.u_V.coeffs.items():
        for j, w in eps.items():
            v = S.index[(e.n, q, j)]
            norm[v] = norm.get(v, 0) + c * w
    rows.append(norm)
    rhs.append(1)
    if order is None and seed is not None:
        order = list(range(S.dim))
        random.Random(seed).shuffle(order)
    x, _ = _solve_rows(rows, rhs, S.dim, order)
    if x is None:
        raise InternalError("no shriek map exists; the truncation or orientation hypotheses must be violated")
    f = S.morphism(x)
    f.name = "phi!"
    return f


@dataclass
class OmegaComplement:
    """Degreewise pieces of ``I`` with ``Q = I (+) Lambda(omega)/(omega^{m+1})``."""
    Q: DegreewiseAlgebra
    omega: Element
    m: int
    pieces: dict  # degree -> Subspace of Q^d

    def dims(self) -> list[int]:
        return [self.pieces[d].dim for d in self.Q.degrees()]

    def split(self, q: Element) -> tuple[mpq, Element]:
        """``q = c * omega^j + i`` with ``i`` in I (``j = |q| / 2``)."""
        d = q.degree
        if d % 2 or d // 2 > self.m:
            return mpq(0), q
        wj = self.Q.power(self.omega, d // 2)
        sub = self.pieces[d]
        ech = RowEchelon(self.Q.dim(d))
        for t, v in enumerate(sub.basis):
            ech.add(v, tag=t)
        ech.add(wj.coeffs, tag="w")
        rem, comb = ech.reduce(q.coeffs)
        if rem:
            raise InternalError("decomposition Q = I + Lambda(omega) failed in degree %d" % d)
        c = comb.get("w", mpq(0))
        return c, q - c * wj


def _perm(n: int, seed: int | None, salt: int):
    if seed is None:
        return None
    out = list(range(n))
    random.Random(seed * 1000003 + salt).shuffle(out)
    return out


def omega_complement(s: SymplecticEmbeddingData, seed: int | None = None) -> OmegaComplement:
    """The unique-up-to-choice sub-dgmodule ``I`` complementary to the powers of omega.

    Built top-down: ``I^{2m}`` contains ``dQ^{2m-1}`` and a complement of
    ``Q omega^m (+) dQ^{2m-1}``; below, ``I^{2k}`` is the kernel of
    ``x -> [omega x]`` in ``Q^{2k+2} / I^{2k+2}``; odd degrees lie wholly in I.
    """
    Q, w, m = s.Q, s.omega, s.m
    if any(Q.dim(d) for d in range(2 * m + 2, Q.hi + 1)):
        raise PreconditionError("Q^{>=2m+2} must vanish")
    pieces = {}
    for d in Q.degrees():
        if d % 2 or d > 2 * m:
            pieces[d] = Subspace(Q.dim(d), [{i: mpq(1)} for i in range(Q.dim(d))], check=False)
    top = 2 * m
    n_top = Q.dim(top)
    ech = RowEchelon(n_top)
    ibasis = []
    for i in range(Q.dim(top - 1)):
        img = Q.diff_image(top - 1, i)
        if img and ech.add(img)[0]:
            ibasis.append(dict(img))
    wm = Q.power(w, m)
    if not ech.add(wm.coeffs)[0]:
        raise PreconditionError("[omega^%d] = 0" % m)
    for i in (_perm(n_top, seed, top) or range(n_top)):
        e_i = {i: mpq(1)}
        if ech.add(e_i)[0]:
            ibasis.append(e_i)
    pieces[top] = Subspace(n_top, ibasis)
    for j in range(m - 1, -1, -1):
        d = 2 * j
        # lambda: Q^d -> Q^{d+2} / I^{d+2}, one dimensional
        up = pieces[d + 2]
        ech = RowEchelon(Q.dim(d + 2))
        for v in up.basis:
            ech.add(v)
        wnext = Q.power(w, j + 1)
        cols = []
        for i in range(Q.dim(d)):
            prod = w * Q.basis_element(d, i)
            rem, _ = ech.reduce(prod.coeffs)
            cols.append(rem)
        # all remainders are multiples of the remainder of omega^{j+1}
        rw, _ = ech.reduce(wnext.coeffs)
        if not rw:
            raise InternalError("omega^%d fell into I" % (j + 1))
        p = min(rw)
        lam = Matrix(1, Q.dim(d), [{i: r.get(p, 0) / rw[p] for i, r in enumerate(cols) if r.get(p)}])
        _, ker = solve(lam, [0], order=_perm(Q.dim(d), seed, d))
        pieces[d] = Subspace(Q.dim(d), ker)
    oc = OmegaComplement(Q, w, m, pieces)
    _verify_complement(oc)
    return oc


def _verify_complement(oc: OmegaComplement) -> None:
    Q, w = oc.Q, oc.omega
    for d in Q.degrees():
        sub = oc.pieces[d]
        extra = 1 if d % 2 == 0 and d // 2 <= oc.m else 0
        if sub.dim + extra != Q.dim(d):
            raise InternalError("I^%d has the wrong dimension" % d)
        for v in sub.basis:
            x = Element(Q, d, v)
            if d + 1 <= Q.hi and not oc.pieces[d + 1].contains(x.d().coeffs):
                raise InternalError("I is not closed under d in degree %d" % d)
            if d + 2 <= Q.hi and not oc.pieces[d + 2].contains((w * x).coeffs):
                raise InternalError("I is not closed under omega in degree %d" % d)


def shriek_cpn(e: EmbeddingModel, s: SymplecticEmbeddingData, seed: int | None = None) -> Morphism:
    """Closed-form shriek map into ``Lambda(a)/(a^{N+1})``: ``omega^j -> l_M a^{j+k}``, ``I -> 0``."""
    e.check_models()
    R = e.R
    gens = [g for g, deg in R.generators]
    if len(gens) != 1 or R.generators[0][1] != 2:
        raise PreconditionError("closed form needs R = Lambda(a)/(a^{N+1}) with |a| = 2")
    a = R.element(gens[0])
    phi_a = e.phi.apply(a)
    if phi_a != s.omega:
        raise PreconditionError("closed form needs phi(a) = omega")
    oc = omega_complement(s, seed)
    M = e.source_module
    k = e.k
    imgs = {}
    for d in M.degrees():
        rows = []
        for i in range(M.dim(d)):
            q = e.Q.basis_element(d - e.r, i)
            c, _ = oc.split(q)
            j = q.degree // 2
            rows.append(vscale(R.power(a, j + k).coeffs, c * s.l_M) if c else {})
        imgs[d] = rows
    f = Morphism(M, e.target_module, imgs, 0, "module", name="phi!")
    rep = f.check()
    if not rep.ok:
        raise InternalError("closed-form shriek map is not an R-linear chain map: %s" % rep)
    return f


# -- Chern classes ---------------------------------------------------------------------------

def _series(terms, Q: DegreewiseAlgebra) -> dict:
    out = {}
    for t in terms:
        t = Q.element(t) if not isinstance(t, Element) else t
        if t.is_zero():
            continue
        out[t.degree] = out[t.degree] + t if t.degree in out else t
    return out


def _series_mul(x: dict, y: dict, top: int) -> dict:
    out = {}
    for d, a in x.items():
        for e, b in y.items():
            if d + e > top:
                continue
            p = a * b
            if p.is_zero():
                continue
            out[d + e] = out[d + e] + p if d + e in out else p
    return out


def chern_normal(total_c_V, pulled_c_W, m: int, k: int, Q: DegreewiseAlgebra | None = None) -> ChernData:
    """``c(nu) = f^* c(W) / c(V)``, inverted as a power series truncated at degree ``m``.

    Both totals are sequences of cocycles (or expressions in ``Q``) whose
    degree 0 part is 1.
    """
    if Q is None:
        Q = next(t.space for t in list(total_c_V) + list(pulled_c_W) if isinstance(t, Element))
    cV = _series(total_c_V, Q)
    cW = _series(pulled_c_W, Q)
    one = Q.unit_element()
    for label, c in (("c(V)", cV), ("f*c(W)", cW)):
        if c.get(0) != one:
            raise InputError("%s must start with 1" % label)
        for d, t in c.items():
            if d % 2:
                raise InputError("%s has an odd degree part" % label)
            if d + 1 <= Q.hi and not t.d().is_zero():
                raise InputError("%s is not a cocycle in degree %d" % (label, d))
    # 1 / (1 + y) = sum (-y)^j
    y = {d: t for d, t in cV.items() if d > 0}
    inv = {0: one}
    power = {0: one}
    for _ in range(m // 2 + 1):
        power = _series_mul(power, {d: -t for d, t in y.items()}, m)
        if not power:
            break
        for d, t in power.items():
            inv[d] = inv[d] + t if d in inv else t
    nu = _series_mul(cW, inv, m)
    gamma = [nu.get(2 * i, Q.zero(2 * i)) if 2 * i <= m else Q.zero(2 * i) for i in range(k)]
    gamma[0] = one
    return ChernData(k, gamma)


# -- complement and projectivization -------------------------------------------------------

@dataclass
class ComplementModel:
    source: DegreewiseAlgebra
    target: DegreewiseAlgebra
    map: Morphism


def complement_model(e: EmbeddingModel, shriek: Morphism) -> ComplementModel:
    """``phi (+) id: R (+)_{phi!} s s^{-r}Q -> Q (+)_0 s s^{-r}Q``."""
    e.check_models()
    src = semi_trivial_cone_cdga(shriek)
    Qmod = DgModule.regular(e.Q)
    MQ = suspension(Qmod, -e.r)
    tgt = semi_trivial_cone_cdga(Morphism.zero(MQ, Qmod))
    R, sM, off_s = src.cone_parts
    Qa, sMQ, off_t = tgt.cone_parts
    imgs = {}
    for d in src.degrees():
        rows = []
        for i in range(R.dim(d)):
            rows.append({k: c for k, c in e.phi.image(d, i).items()})
        for i in range(sM.dim(d)):
            rows.append({off_t[d] + i: mpq(1)})
        imgs[d] = rows
    f = Morphism(src, tgt, imgs, 0, "algebra", name="phi+id")
    rep = f.check()
    if not rep.ok:
        raise InternalError("complement map is not a CDGA morphism: %s" % rep)
    return ComplementModel(src, tgt, f)


@dataclass
class ProjectivizationModel:
    total: DegreewiseAlgebra
    fiber_side: DegreewiseAlgebra
    map: Morphism
    k: int


def _lift(B: DegreewiseAlgebra, q: Element, gname: str, p: int) -> Element:
    """``q (x) g^p`` for an even generator ``g`` of degree 2 adjoined by :func:`free_extension`."""
    from .algebra import _join
    out = {}
    for i, c in q.coeffs.items():
        name = _join(q.space.basis[q.degree][i], gname, p)
        hit = B.find(name)
        if hit is None:
            continue
        out[hit[1]] = c
    return Element(B, q.degree + 2 * p, out)


def projectivization_model(Q: DegreewiseAlgebra, chern: ChernData, N: int | None = None) -> ProjectivizationModel:
    """``(Q (x) Lambda(x, z), Dz = sum gamma_i x^{k-i}) -> (Q (x) Lambda(z), 0)``, x -> 0."""
    k = chern.k
    dimV = _top_nonzero(Q)
    if Q.truncated:
        raise PreconditionError("Q must be a finite model")
    if 2 * k < dimV + 2:
        raise PreconditionError("need 2k >= dim V + 2 (k = %d, dim V = %d)" % (k, dimV))
    if N is None:
        N = dimV + 2 * k + 1
    B1 = free_extension(Q, [("x", 2, None)], N, check=False)
    dz = B1.zero(2 * k)
    for i, g in enumerate(chern.gamma):
        if g.space is not Q:
            raise InputError("Chern representatives must live in Q")
        if not g.is_zero():
            dz = dz + _lift(B1, g, "x", k - i)
    total = free_extension(B1, [("z", 2 * k - 1, dz)], N, name="P(nu)")
    side = free_extension(Q, [("z", 2 * k - 1, None)], N, name="Q(x)L(z)")
    imgs = {g: g for g, _ in Q.generators}
    imgs.update({"x": None, "z": "z"})
    f = algebra_map(total, side, imgs)
    return ProjectivizationModel(total, side, f, k)


def leray_hirsch_dims(Q: DegreewiseAlgebra, k: int, top: int) -> list[int]:
    HQ = cohomology(Q, (0, Q.hi))
    return [sum(HQ.dim(d - 2 * j) for j in range(k) if 0 <= d - 2 * j <= Q.hi) for d in range(top + 1)]


# -- the blow-up model ----------------------------------------------------------------------

def _qname(qname: str, j: int, e: int) -> str:
    parts = [] if qname == "1" else [qname]
    if j:
        parts.append("x" if j == 1 else "x^%d" % j)
    if e:
        parts.append("z")
    return "*".join(parts) if parts else "1"


class BlowupAlgebra(DegreewiseAlgebra):
    """``R (+) Q (x) Lambda^+(x, z)``; Q's generators are not elements on their own."""

    def _word_element(self, word):
        bare = set(word) & self._phantom
        if bare and not ({"x", "z"} & set(word)):
            raise InputError("%s lives in Q; only q*x^j and q*x^j*z are elements of the blow-up model"
                             % "*".join(word))
        return super()._word_element(word)


@dataclass
class BlowupModel:
    algebra: DegreewiseAlgebra
    iota: Morphism
    embedding: EmbeddingModel
    chern: ChernData
    shriek: Morphism
    N: int
    index: dict = field(repr=False)
    _ring: CohomologyRing | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.embedding.n

    @property
    def k(self) -> int:
        return self.chern.k

    @property
    def x(self) -> Element:
        return self.algebra.basis_element("x")

    @property
    def z(self) -> Element:
        return self.algebra.basis_element("z")

    def lift(self, q: Element, j: int, e: int = 0) -> Element:
        """``q (x) x^j z^e`` as an element of the model."""
        if q.space is not self.embedding.Q:
            raise InputError("lift needs an element of Q")
        out = {}
        for i, c in q.coeffs.items():
            hit = self.index.get(("Q", q.degree, i, j, e))
            if hit is not None:
                out[hit[1]] = c
        deg = q.degree + 2 * j + e * (2 * self.k - 1)
        return Element(self.algebra, deg, out)

    def ring(self) -> CohomologyRing:
        if self._ring is None:
            self._ring = cup_structure(self.algebra, (0, self.N - 1), formal_dimension=self.n)
        return self._ring


def blowup_model(e: EmbeddingModel, shriek: Morphism, chern: ChernData, N: int | None = None,
                 check: bool = True) -> BlowupModel:
    """Build ``B(R, Q) = (R (+) Q (x) Lambda^+(x, z), D)`` and ``iota: R -> B``.

    Basis in degree t: R^t, then ``q x^j`` (j >= 1), then ``q x^j z`` (j >= 0).
    ``D(q x^j z) = dq x^j z + (-1)^{|q|} ([j = 0] phi!(s^{-2k} q) + sum_i q gamma_i x^{k-i+j})``.
    """
    e.check_blowup()
    R, Q, phi = e.R, e.Q, e.phi
    k = e.k
    if chern.k != k:
        raise InputError("Chern data has rank %d but the codimension gives k = %d" % (chern.k, k))
    if shriek.source is not e.source_module or shriek.target is not e.target_module:
        raise InputError("shriek map must be built for this embedding")
    if N is None:
        N = e.n + 2
    if N < e.n:
        raise InputError("top degree N must be at least n = %d" % e.n)
    zdeg = 2 * k - 1
    basis = {t: [] for t in range(N + 1)}
    index = {}
    for t in range(N + 1):
        for i in range(R.dim(t)):
            index[("R", t, i)] = (t, len(basis[t]))
            basis[t].append(R.basis[t][i])
        for ez in (0, 1):
            for j in range(0 if ez else 1, N // 2 + 1):
                qd = t - 2 * j - ez * zdeg
                if qd < 0:
                    continue
                for i in range(Q.dim(qd)):
                    index[("Q", qd, i, j, ez)] = (t, len(basis[t]))
                    basis[t].append(_qname(Q.basis[qd][i], j, ez))
    seen = set()
    for t in basis:
        for nm in basis[t]:
            if nm in seen:
                raise InputError("basis name clash %r: rename generators of R or Q" % nm)
            seen.add(nm)

    def qvec(qd, v, j, ez):
        out = {}
        for i, c in v.items():
            hit = index.get(("Q", qd, i, j, ez))
            if hit is not None:
                out[hit[1]] = c
        return out

    mult = {}
    qkeys = [(key, pos) for key, pos in index.items() if key[0] == "Q"]
    rkeys = [(key, pos) for key, pos in index.items() if key[0] == "R" and key[1] > 0]
    for (_, rd, ri), (t, ti) in rkeys:
        for (_, sd, si), (u, ui) in rkeys:
            if t + u <= N:
                prod = R.basis_mul(rd, ri, sd, si)
                if prod:
                    mult[(t, ti, u, ui)] = {index[("R", t + u, k2)][1]: c for k2, c in prod.items()}
        fr = phi.image(rd, ri)
        if not fr:
            continue
        for (_, qd, qi, j, ez), (u, ui) in qkeys:
            if t + u > N:
                continue
            prod = {}
            for k2, c in fr.items():
                vaxpy(prod, Q.basis_mul(rd, k2, qd, qi), c)
            v = qvec(rd + qd, prod, j, ez)
            if v:
                mult[(t, ti, u, ui)] = v
                mult[(u, ui, t, ti)] = vscale(v, _sgn(t * u))
    for (_, qd, qi, j, ez), (t, ti) in qkeys:
        for (_, pd, pi, j2, ez2), (u, ui) in qkeys:
            if t + u > N or ez + ez2 > 1:
                continue
            prod = Q.basis_mul(qd, qi, pd, pi)
            v = qvec(qd + pd, prod, j + j2, ez + ez2)
            if v:
                mult[(t, ti, u, ui)] = vscale(v, _sgn(ez * pd))
    M = e.source_module
    diff = {t: [None] * len(basis[t]) for t in range(N + 1)}
    for key, (t, ti) in index.items():
        out = {}
        if t + 1 <= N:
            if key[0] == "R":
                _, rd, ri = key
                out = {index[("R", rd + 1, k2)][1]: c for k2, c in R.diff_image(rd, ri).items()}
            else:
                _, qd, qi, j, ez = key
                out = qvec(qd + 1, Q.diff_image(qd, qi), j, ez)
                if ez:
                    sg = _sgn(qd)
                    if j == 0:
                        for k2, c in shriek.image(qd + e.r, qi).items():
                            vaxpy(out, {index[("R", t + 1, k2)][1]: c}, sg)
                    for i, g in enumerate(chern.gamma):
                        if g.is_zero():
                            continue
                        prod = {}
                        for gi, gc in g.coeffs.items():
                            vaxpy(prod, Q.basis_mul(qd, qi, g.degree, gi), gc)
                        vaxpy(out, qvec(qd + g.degree, prod, k - i + j, 0), sg)
        diff[t][ti] = out
    gens = tuple(R.generators) + tuple(Q.generators) + (("x", 2), ("z", zdeg))
    B = BlowupAlgebra(basis, mult, diff, generators=gens, truncated=True, name="B(R,Q)", check=False)
    B._phantom = {g for g, _ in Q.generators}
    if check:
        rep = validate(B)
        if not rep.ok:
            raise InternalError("blow-up model fails validation: %s" % rep)
    iota = Morphism(R, B, {d: [{index[("R", d, i)][1]: mpq(1)} for i in range(R.dim(d))]
                           for d in R.degrees() if d <= N}, 0, "algebra", name="iota")
    return BlowupModel(B, iota, e, chern, shriek, N, index)


def betti_additivity(e: EmbeddingModel, top: int) -> list[int]:
    """``dim H^d(R) + sum_{j=1}^{k-1} dim H^{d-2j}(Q)`` for ``d <= top``."""
    HR = cohomology(e.R, (0, e.R.hi))
    HQ = cohomology(e.Q, (0, e.Q.hi))
    return [HR.dim(d) + sum(HQ.dim(d - 2 * j) for j in range(1, e.k) if d - 2 * j >= 0)
            for d in range(top + 1)]
