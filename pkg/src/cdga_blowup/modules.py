"""Differential graded modules, morphisms and the constructions built on them."""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from . import expr as _expr
from .algebra import DegreewiseAlgebra, Element, GradedSpace, ValidationReport, _vec_str, validate
from .errors import InputError, PreconditionError, ValidationError
from .linalg import Matrix, Q, RowEchelon, solve, vaxpy, vscale


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


class DgModule(GradedSpace):
    """A dgmodule over a connected CDGA, stored in degrees ``lo..hi``.

    ``action`` maps ``(rd, ri, md, mi)`` with ``rd >= 1`` to the sparse image
    of ``r * m`` in degree ``rd + md``; the unit acts as the identity.
    """

    def __init__(self, base: DegreewiseAlgebra, lo: int, hi: int, basis: dict, action: dict,
                 diff: dict | None = None, *, truncated: bool = False, name: str = "",
                 check: bool = True):
        super().__init__(lo, hi, basis, diff, truncated, name)
        self.base = base
        self._action = {}
        for (rd, ri, md, mi), v in action.items():
            if rd == 0 or not lo <= rd + md <= hi:
                continue
            v = {k: Q(x) for k, x in v.items() if x}
            if v:
                self._action[(rd, ri, md, mi)] = v
        self.suspended_from = None
        if check:
            rep = self.validate()
            if not rep.ok:
                raise ValidationError(rep)

    @classmethod
    def regular(cls, A: DegreewiseAlgebra) -> "DgModule":
        """A as a module over itself."""
        action = {k: v for k, v in A.mult_items()}
        for d in range(1, A.hi + 1):
            for i in range(A.dim(d)):
                action[(d, i, 0, 0)] = {i: mpq(1)}
        M = cls(A, 0, A.hi, A.basis, action, {d: A._diff[d] for d in A.degrees()},
                truncated=A.truncated, name=A.name, check=False)
        M.generators = A.generators
        return M

    @classmethod
    def restriction(cls, phi: "Morphism") -> "DgModule":
        """The target of an algebra map as a module over its source."""
        R, Qa = phi.source, phi.target
        action = {}
        for rd in range(1, R.hi + 1):
            for ri in range(R.dim(rd)):
                img = phi.image(rd, ri)
                if not img:
                    continue
                for md in range(0, Qa.hi + 1 - rd):
                    for mi in range(Qa.dim(md)):
                        out = {}
                        for k, c in img.items():
                            vaxpy(out, Qa.basis_mul(rd, k, md, mi), c)
                        if out:
                            action[(rd, ri, md, mi)] = out
        M = cls(R, 0, Qa.hi, Qa.basis, action, {d: Qa._diff[d] for d in Qa.degrees()},
                truncated=Qa.truncated, name=Qa.name, check=False)
        M.generators = Qa.generators
        return M

    def basis_act(self, rd: int, ri: int, md: int, mi: int) -> dict:
        if rd == 0:
            return {mi: mpq(1)}
        if not self.lo <= rd + md <= self.hi:
            return {}
        return self._action.get((rd, ri, md, mi), {})

    def act(self, r: Element, m: Element) -> Element:
        if r.space is not self.base:
            raise InputError("scalar is not in the base algebra")
        out = {}
        deg = r.degree + m.degree
        for i, a in r.coeffs.items():
            for j, b in m.coeffs.items():
                vaxpy(out, self.basis_act(r.degree, i, m.degree, j), a * b)
        return Element(self, deg, out)

    def action_items(self):
        return self._action.items()

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        R = self.base
        hi = self.hi
        for d in range(self.lo, hi - 1):
            for i in range(self.dim(d)):
                dd = {}
                for k, c in self.diff_image(d, i).items():
                    vaxpy(dd, self.diff_image(d + 1, k), c)
                rep.count("d^2")
                if dd:
                    rep.fail("d^2(%s) = %s" % (self.basis[d][i], _vec_str(self, d + 2, dd)))
        rdegs = [d for d in range(1, R.hi + 1) if R.dim(d)]
        mdegs = [d for d in self.degrees() if self.dim(d)]
        for rd in rdegs:
            for md in mdegs:
                if rd + md > hi - 1:
                    continue
                sgn = _sgn(rd)
                for ri in range(R.dim(rd)):
                    dr = R.diff_image(rd, ri)
                    for mi in range(self.dim(md)):
                        rep.count("leibniz")
                        lhs = {}
                        for t, c in self.basis_act(rd, ri, md, mi).items():
                            vaxpy(lhs, self.diff_image(rd + md, t), c)
                        rhs = {}
                        for t, c in dr.items():
                            vaxpy(rhs, self.basis_act(rd + 1, t, md, mi), c)
                        for t, c in self.diff_image(md, mi).items():
                            vaxpy(rhs, self.basis_act(rd, ri, md + 1, t), sgn * c)
                        if lhs != rhs:
                            rep.fail("module Leibniz fails on %s . %s" % (R.basis[rd][ri], self.basis[md][mi]))
        bound = R.hi
        for rd in rdegs:
            for sd in rdegs:
                if rd + sd > bound:
                    continue
                for md in mdegs:
                    if rd + sd + md > hi:
                        continue
                    for ri in range(R.dim(rd)):
                        for si in range(R.dim(sd)):
                            rs = R.basis_mul(rd, ri, sd, si)
                            for mi in range(self.dim(md)):
                                rep.count("action associativity")
                                left = {}
                                for t, c in rs.items():
                                    vaxpy(left, self.basis_act(rd + sd, t, md, mi), c)
                                right = {}
                                for t, c in self.basis_act(sd, si, md, mi).items():
                                    vaxpy(right, self.basis_act(rd, ri, sd + md, t), c)
                                if left != right:
                                    rep.fail("(%s*%s).%s != %s.(%s.%s)" % (
                                        R.basis[rd][ri], R.basis[sd][si], self.basis[md][mi],
                                        R.basis[rd][ri], R.basis[sd][si], self.basis[md][mi]))
        return rep

    def __repr__(self):
        dims = ",".join("%d:%d" % (d, self.dim(d)) for d in self.degrees() if self.dim(d))
        return "DgModule(%s over %s; %s)" % (self.name, self.base.name, dims)


# -- morphisms ---------------------------------------------------------------

class Morphism:
    """A linear map of graded objects raising degree by ``shift``.

    ``images[d][i]`` is the sparse image of basis element ``i`` of degree
    ``d`` in the target's degree ``d + shift``.  ``kind`` is ``"algebra"``
    for CDGA maps and ``"module"`` for maps of dgmodules over a common base.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, images: dict, shift: int = 0,
                 kind: str = "module", name: str = ""):
        if kind not in ("algebra", "module", "linear"):
            raise InputError("unknown morphism kind %r" % kind)
        if kind == "algebra" and (shift or not isinstance(source, DegreewiseAlgebra)
                                  or not isinstance(target, DegreewiseAlgebra)):
            raise InputError("algebra morphisms are degree 0 maps between algebras")
        if kind == "module" and getattr(source, "base", None) is not getattr(target, "base", None):
            raise InputError("module morphism between modules over different algebras")
        self.source, self.target = source, target
        self.shift = shift
        self.kind = kind
        self.name = name
        self.images = {}
        for d in source.degrees():
            rows = images.get(d)
            if rows is None:
                rows = [{} for _ in range(source.dim(d))]
            if len(rows) != source.dim(d):
                raise InputError("morphism images in degree %d: %d given, %d needed"
                                 % (d, len(rows), source.dim(d)))
            tdim = target.dim(d + shift)
            clean = []
            for r in rows:
                r = {k: Q(v) for k, v in r.items() if v}
                if any(not 0 <= k < tdim for k in r):
                    raise InputError("morphism image outside target degree %d" % (d + shift))
                clean.append(r)
            self.images[d] = clean

    # -- construction helpers
    @classmethod
    def identity(cls, X: GradedSpace) -> "Morphism":
        kind = "algebra" if isinstance(X, DegreewiseAlgebra) else "module"
        return cls(X, X, {d: [{i: mpq(1)} for i in range(X.dim(d))] for d in X.degrees()}, 0, kind)

    @classmethod
    def zero(cls, X: GradedSpace, Y: GradedSpace, shift: int = 0, kind: str = "module") -> "Morphism":
        return cls(X, Y, {}, shift, kind)

    def image(self, d: int, i: int) -> dict:
        rows = self.images.get(d)
        return rows[i] if rows is not None else {}

    def apply(self, x: Element) -> Element:
        if x.space is not self.source:
            raise InputError("element is not in the source of this morphism")
        out = {}
        for i, c in x.coeffs.items():
            vaxpy(out, self.image(x.degree, i), c)
        return Element(self.target, x.degree + self.shift, out)

    __call__ = apply

    def matrix(self, d: int) -> Matrix:
        return Matrix.from_columns(self.target.dim(d + self.shift),
                                   [self.image(d, i) for i in range(self.source.dim(d))])

    def _combine(self, other: "Morphism", c) -> "Morphism":
        if (other.source is not self.source or other.target is not self.target
                or other.shift != self.shift):
            raise InputError("morphisms are not parallel")
        imgs = {}
        for d in self.source.degrees():
            imgs[d] = [dict_add(a, b, c) for a, b in zip(self.images[d], other.images[d])]
        kind = "module" if self.kind == "module" else "linear"
        return Morphism(self.source, self.target, imgs, self.shift, kind)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scaled(self, c) -> "Morphism":
        imgs = {d: [vscale(r, c) for r in rows] for d, rows in self.images.items()}
        kind = "module" if self.kind == "module" else "linear"
        return Morphism(self.source, self.target, imgs, self.shift, kind)

    def __neg__(self):
        return self.scaled(-1)

    def compose(self, first: "Morphism") -> "Morphism":
        """``self o first``."""
        if first.target is not self.source:
            raise InputError("cannot compose: target/source mismatch")
        imgs = {}
        for d in first.source.degrees():
            rows = []
            for r in first.images[d]:
                out = {}
                for k, c in r.items():
                    vaxpy(out, self.image(d + first.shift, k), c)
                rows.append(out)
            imgs[d] = rows
        kind = self.kind if self.kind == first.kind else "linear"
        return Morphism(first.source, self.target, imgs, self.shift + first.shift, kind)

    def is_injective(self) -> bool:
        return all(self.matrix(d).rank() == self.source.dim(d) for d in self.source.degrees())

    def equals(self, other: "Morphism") -> bool:
        return all(self.images[d] == other.images[d] for d in self.source.degrees())

    def check(self) -> ValidationReport:
        """Chain-map, multiplicativity and linearity checks within bound."""
        rep = ValidationReport()
        X, Y, s = self.source, self.target, self.shift
        sign = _sgn(s)
        top = min(X.hi, Y.hi - s)
        for d in X.degrees():
            if d + 1 > top:
                break
            for i in range(X.dim(d)):
                rep.count("chain")
                lhs = {}
                for k, c in self.image(d, i).items():
                    vaxpy(lhs, Y.diff_image(d + s, k), c)
                rhs = {}
                for k, c in X.diff_image(d, i).items():
                    vaxpy(rhs, self.image(d + 1, k), sign * c)
                if lhs != rhs:
                    rep.fail("not a chain map at %s" % X.basis[d][i])
        if self.kind == "algebra":
            if self.image(0, 0) != {0: 1}:
                rep.fail("unit is not sent to unit")
            degs = [d for d in range(1, X.hi + 1) if X.dim(d)]
            for d in degs:
                for e in degs:
                    if d + e > min(X.hi, Y.hi):
                        continue
                    for i in range(X.dim(d)):
                        fi = self.image(d, i)
                        for j in range(X.dim(e)):
                            rep.count("multiplicative")
                            lhs = {}
                            for k, c in X.basis_mul(d, i, e, j).items():
                                vaxpy(lhs, self.image(d + e, k), c)
                            rhs = {}
                            fj = self.image(e, j)
                            for k1, c1 in fi.items():
                                for k2, c2 in fj.items():
                                    vaxpy(rhs, Y.basis_mul(d, k1, e, k2), c1 * c2)
                            if lhs != rhs:
                                rep.fail("f(%s*%s) != f(%s)*f(%s)" % (
                                    X.basis[d][i], X.basis[e][j], X.basis[d][i], X.basis[e][j]))
        elif self.kind == "module":
            R = X.base
            for rd in range(1, R.hi + 1):
                rs = _sgn(s * rd)
                for md in X.degrees():
                    t = rd + md
                    if t > X.hi or t + s > Y.hi:
                        continue
                    for ri in range(R.dim(rd)):
                        for mi in range(X.dim(md)):
                            rep.count("linear")
                            lhs = {}
                            for k, c in X.basis_act(rd, ri, md, mi).items():
                                vaxpy(lhs, self.image(t, k), c)
                            rhs = {}
                            for k, c in self.image(md, mi).items():
                                vaxpy(rhs, Y.basis_act(rd, ri, md + s, k), rs * c)
                            if lhs != rhs:
                                rep.fail("f(%s.%s) != +-%s.f(%s)" % (
                                    R.basis[rd][ri], X.basis[md][mi], R.basis[rd][ri], X.basis[md][mi]))
        return rep

    def __repr__(self):
        return "Morphism(%s -> %s, shift=%d, %s)" % (self.source.name, self.target.name, self.shift, self.kind)


def dict_add(a: dict, b: dict, c=1) -> dict:
    out = dict(a)
    vaxpy(out, b, c)
    return out


def algebra_map(R: DegreewiseAlgebra, Qa: DegreewiseAlgebra, images: dict, check: bool = True,
                constants: dict | None = None) -> Morphism:
    """Algebra morphism from images of the generators of ``R``.

    ``R``'s basis must consist of monomials in its generators (true for every
    presentation-built algebra).
    """
    gens = dict(R.generators)
    if not gens:
        raise InputError("source algebra has no generator table")
    gimg = {}
    for g, deg in gens.items():
        val = images.get(g, None)
        if val is None:
            gimg[g] = Qa.zero(deg)
            continue
        el = val if isinstance(val, Element) else Qa.element(str(val), constants)
        if not el.is_zero() and el.degree != deg:
            raise InputError("image of %s has degree %d, expected %d" % (g, el.degree, deg))
        gimg[g] = Element(Qa, deg, el.coeffs)
    unknown = set(images) - set(gens)
    if unknown:
        raise InputError("images given for unknown generators %s" % sorted(unknown))
    imgs = {}
    for d in R.degrees():
        rows = []
        for name in R.basis[d]:
            if name == "1":
                rows.append({0: mpq(1)} if d == 0 else {})
                continue
            ((c, word),) = _expr.parse(name)
            out = Qa.unit_element()
            for sym in word:
                out = out * gimg[sym]
            rows.append(vscale(out.coeffs, c) if out.degree == d else {})
        imgs[d] = rows
    f = Morphism(R, Qa, imgs, 0, "algebra")
    if check:
        rep = f.check()
        if not rep.ok:
            raise ValidationError(rep)
    return f


# -- suspension and cones ------------------------------------------------------

def _sname(k: int, name: str) -> str:
    if k == 1:
        return "s(%s)" % name
    return "s^%d(%s)" % (k, name)


def suspension(M: DgModule, k: int) -> DgModule:
    """``s^k M`` with ``(s^k M)^j = M^{k+j}``.

    Signs: ``r . s^k x = (-1)^{|r| k} s^k (r . x)`` and ``d s^k x = (-1)^k s^k dx``.
    """
    if k == 0:
        return M
    basis = {j: [_sname(k, nm) for nm in M.basis[j + k]] for j in range(M.lo - k, M.hi - k + 1)}
    dsign = _sgn(k)
    diff = {j: [vscale(r, dsign) for r in M._diff[j + k]] for j in basis}
    action = {}
    for (rd, ri, md, mi), v in M.action_items():
        action[(rd, ri, md - k, mi)] = vscale(v, _sgn(rd * k))
    S = DgModule(M.base, M.lo - k, M.hi - k, basis, action, diff, truncated=M.truncated,
                 name=_sname(k, M.name or "M"), check=False)
    S.suspended_from = (M, k)
    return S


def mapping_cone(f: Morphism) -> DgModule:
    """``B (+)_f sA`` for a degree 0 module map ``f: A -> B``.

    ``d(b, sa) = (d_B b + f(a), -s d_A a)``.  In each degree the basis lists
    B's elements first, then the suspended ones.
    """
    if f.kind != "module" or f.shift != 0:
        raise InputError("mapping cone needs a degree 0 module morphism")
    rep = f.check()
    if not rep.ok:
        raise InputError("mapping cone of an invalid map: %s" % rep)
    A, B = f.source, f.target
    sA = suspension(A, 1)
    lo, hi = min(B.lo, sA.lo), max(B.hi, sA.hi)
    off = {j: B.dim(j) for j in range(lo, hi + 1)}
    basis = {j: list(B.basis.get(j, ())) + list(sA.basis.get(j, ())) for j in range(lo, hi + 1)}
    diff = {}
    for j in range(lo, hi + 1):
        rows = [dict(B.diff_image(j, i)) if j in B.basis else {} for i in range(B.dim(j))]
        for i in range(sA.dim(j)):
            out = dict(f.image(j + 1, i))
            for k, c in sA.diff_image(j, i).items():
                out[off.get(j + 1, 0) + k] = out.get(off.get(j + 1, 0) + k, 0) + c
            rows.append(out)
        diff[j] = rows
    action = {}
    for (rd, ri, md, mi), v in B.action_items():
        action[(rd, ri, md, mi)] = v
    for (rd, ri, md, mi), v in sA.action_items():
        t = rd + md
        action[(rd, ri, md, off[md] + mi)] = {off[t] + k: c for k, c in v.items()}
    C = DgModule(B.base, lo, hi, basis, action, diff, truncated=A.truncated or B.truncated,
                 name="cone(%s)" % (f.name or "f"), check=False)
    rep = C.validate()
    if not rep.ok:
        raise ValidationError(rep)
    C.cone_parts = (B, sA, off)
    return C


def _as_regular_target(f: Morphism) -> DegreewiseAlgebra:
    R = f.source.base
    T = f.target
    if T is R:
        return R
    if isinstance(T, DgModule) and T.base is R and T.basis == R.basis:
        if dict(T.action_items()) == dict(DgModule.regular(R).action_items()):
            return R
    raise InputError("semi-trivial cone needs a map into the base algebra itself")


def semi_trivial_cone_cdga(f: Morphism, check: bool = True) -> DegreewiseAlgebra:
    """CDGA structure on the cone ``R (+)_f sM`` of a module map ``f: M -> R``.

    Suspension classes multiply to zero.  Requires either that ``f`` is
    injective (the inclusion of an ideal) or that ``M`` is concentrated in
    degrees ``[p, 2p)`` for some ``p``.
    """
    if f.shift != 0 or not isinstance(f.source, DgModule):
        raise InputError("need a degree 0 map from a dgmodule")
    M = f.source
    R = _as_regular_target(f)
    present = [d for d in M.degrees() if M.dim(d)]
    hyp2 = not present or (present[0] >= 1 and present[-1] < 2 * present[0])
    hyp1 = f.is_injective()
    if not (hyp1 or hyp2):
        raise PreconditionError("semi-trivial CDGA structure needs f injective or M concentrated "
                                "in degrees [p, 2p); M lives in degrees %d..%d" % (present[0], present[-1]))
    if present and present[0] < 2:
        raise PreconditionError("suspension classes would sit in degree < 1")
    rep = f.check()
    if not rep.ok:
        raise InputError("semi-trivial cone of an invalid map: %s" % rep)
    sM = suspension(M, 1)
    N = max(R.hi, sM.hi)
    off = {j: R.dim(j) for j in range(N + 1)}
    basis = {j: list(R.basis.get(j, ())) + list(sM.basis.get(j, ())) for j in range(N + 1)}
    mult = {}
    for (d, i, e, j), v in R.mult_items():
        mult[(d, i, e, j)] = v
    for (rd, ri, md, mi), v in sM.action_items():
        t = rd + md
        img = {off[t] + k: c for k, c in v.items()}
        mult[(rd, ri, md, off[md] + mi)] = img
        mult[(md, off[md] + mi, rd, ri)] = vscale(img, _sgn(rd * md))
    diff = {}
    for j in range(N + 1):
        rows = [dict(R.diff_image(j, i)) for i in range(R.dim(j))]
        for i in range(sM.dim(j)):
            out = dict(f.image(j + 1, i))
            for k, c in sM.diff_image(j, i).items():
                key = off.get(j + 1, 0) + k
                out[key] = out.get(key, 0) + c
            rows.append(out)
        diff[j] = rows
    gens = R.generators
    A = DegreewiseAlgebra(basis, mult, diff, generators=gens, truncated=R.truncated or M.truncated,
                          name="%s+s(%s)" % (R.name, M.name), check=False)
    A.cone_parts = (R, sM, off)
    if check:
        rep = validate(A)
        if not rep.ok:
            raise ValidationError(rep)
    return A


# -- linear maps as unknowns -------------------------------------------------

class MapSpace:
    """All linear maps ``M -> N`` raising degree by ``shift``, as a coordinate space."""

    def __init__(self, M: GradedSpace, N: GradedSpace, shift: int):
        self.M, self.N, self.shift = M, N, shift
        self.vars = []
        self.index = {}
        for d in M.degrees():
            t = d + shift
            for i in range(M.dim(d)):
                for j in range(N.dim(t)):
                    self.index[(d, i, j)] = len(self.vars)
                    self.vars.append((d, i, j))

    @property
    def dim(self) -> int:
        return len(self.vars)

    def to_images(self, vec: dict) -> dict:
        imgs = {d: [{} for _ in range(self.M.dim(d))] for d in self.M.degrees()}
        for v, c in vec.items():
            d, i, j = self.vars[v]
            if c:
                imgs[d][i][j] = c
        return imgs

    def from_images(self, imgs: dict) -> dict:
        out = {}
        for d, rows in imgs.items():
            for i, r in enumerate(rows):
                for j, c in r.items():
                    if c:
                        out[self.index[(d, i, j)]] = c
        return out

    def morphism(self, vec: dict, kind: str = "module") -> Morphism:
        return Morphism(self.M, self.N, self.to_images(vec), self.shift, kind)

    def linearity_rows(self) -> list[dict]:
        """Rows of ``F(r.m) - (-1)^{shift |r|} r.F(m) = 0``."""
        M, N, s = self.M, self.N, self.shift
        R = M.base
        rows = []
        for rd in range(1, R.hi + 1):
            sg = _sgn(s * rd)
            for md in M.degrees():
                t = rd + md
                if t > M.hi or t + s > N.hi or t + s < N.lo:
                    continue
                for ri in range(R.dim(rd)):
                    for mi in range(M.dim(md)):
                        eq: dict = {}
                        for k, c in M.basis_act(rd, ri, md, mi).items():
                            for j in range(N.dim(t + s)):
                                key = (j, self.index[(t, k, j)])
                                eq[key] = eq.get(key, 0) + c
                        for j0 in range(N.dim(md + s)):
                            for j, c in N.basis_act(rd, ri, md + s, j0).items():
                                key = (j, self.index[(md, mi, j0)])
                                eq[key] = eq.get(key, 0) - sg * c
                        byrow: dict = {}
                        for (j, v), c in eq.items():
                            if c:
                                byrow.setdefault(j, {})[v] = c
                        rows.extend(r for r in byrow.values() if r)
        return rows

    def chain_rows(self):
        """Rows ``(coords, key)`` of ``D F = d_N F - (-1)^shift F d_M``, one per output coordinate."""
        M, N, s = self.M, self.N, self.shift
        sign = _sgn(s)
        out = []
        for d in M.degrees():
            t = d + s + 1
            if t > N.hi or t < N.lo:
                continue
            for i in range(M.dim(d)):
                eq: dict = {}
                for j in range(N.dim(d + s)):
                    v = self.index[(d, i, j)]
                    for k, c in N.diff_image(d + s, j).items():
                        eq.setdefault(k, {})
                        eq[k][v] = eq[k].get(v, 0) + c
                if d + 1 <= M.hi:
                    for k1, c1 in M.diff_image(d, i).items():
                        for k in range(N.dim(t)):
                            v = self.index[(d + 1, k1, k)]
                            eq.setdefault(k, {})
                            eq[k][v] = eq[k].get(v, 0) - sign * c1
                for k in range(N.dim(t)):
                    row = {v: c for v, c in eq.get(k, {}).items() if c}
                    out.append((row, (d, i, k)))
        return out

    def apply_D(self, imgs: dict) -> dict:
        """``D F`` as images of degree ``shift + 1``."""
        M, N, s = self.M, self.N, self.shift
        sign = _sgn(s)
        out = {}
        for d in M.degrees():
            rows = []
            for i in range(M.dim(d)):
                acc = {}
                for j, c in imgs[d][i].items():
                    vaxpy(acc, N.diff_image(d + s, j), c)
                if d + 1 <= M.hi:
                    for k1, c1 in M.diff_image(d, i).items():
                        vaxpy(acc, imgs[d + 1][k1], -sign * c1)
                rows.append(acc)
            out[d] = rows
        return out


def _solve_rows(rows: list[dict], rhs: list, nvars: int, order=None):
    A = Matrix(len(rows), nvars, rows)
    b = {i: Q(c) for i, c in enumerate(rhs) if c}
    return solve(A, b, order)


# -- Hom complexes ---------------------------------------------------------------

class HomComplex(GradedSpace):
    """``Hom_R(M, N)`` in a window of degrees, with ``(Df) = d_N f - (-1)^i f d_M``."""

    def __init__(self, M: DgModule, N: DgModule, lo: int, hi: int):
        if M.base is not N.base:
            raise InputError("Hom complex needs modules over the same algebra")
        self.M, self.N = M, N
        self.spaces = {}
        self.maps = {}
        basis = {}
        for i in range(lo - 1, hi + 2):
            S = MapSpace(M, N, i)
            _, ker = _solve_rows(S.linearity_rows(), [], S.dim)
            self.spaces[i] = S
            self.maps[i] = ker
            basis[i] = ["f%d_%d" % (i, t) for t in range(len(ker))]
        diff = {}
        for i in range(lo - 1, hi + 2):
            S = self.spaces[i]
            T = self.spaces.get(i + 1)
            rows = []
            if T is not None:
                ech = RowEchelon(T.dim)
                for t, v in enumerate(self.maps[i + 1]):
                    ech.add(v, tag=t)
            for v in self.maps[i]:
                if T is None:
                    rows.append({})
                    continue
                Dv = T.from_images(S.apply_D(S.to_images(v)))
                rem, comb = ech.reduce(Dv)
                if rem:
                    raise ValidationError("D does not preserve R-linear maps")
                rows.append(comb)
            diff[i] = rows
        super().__init__(lo - 1, hi + 1, basis, diff, truncated=True, name="Hom(%s,%s)" % (M.name, N.name))
        self.valid_lo = lo
        self.window = (lo, hi)

    @property
    def valid_hi(self) -> int:
        return self.hi - 1

    def morphism(self, degree: int, idx: int) -> Morphism:
        return self.spaces[degree].morphism(self.maps[degree][idx])

    def element_morphism(self, x: Element) -> Morphism:
        S = self.spaces[x.degree]
        vec = {}
        for t, c in x.coeffs.items():
            vaxpy(vec, self.maps[x.degree][t], c)
        return S.morphism(vec)


def hom_complex(M: DgModule, N: DgModule, window: tuple[int, int]) -> HomComplex:
    lo, hi = window
    return HomComplex(M, N, lo, hi)


# -- homotopies ------------------------------------------------------------------

@dataclass
class HomotopyWitness:
    """``h`` of degree -1 with ``d h + h d = f0 - f1``."""
    f0: Morphism
    f1: Morphism
    h: Morphism

    def check(self) -> bool:
        S = MapSpace(self.f0.source, self.f0.target, -1)
        Dh = S.apply_D(self.h.images)
        diff = (self.f0 - self.f1).images
        if any(Dh[d] != diff[d] for d in self.f0.source.degrees()):
            return False
        return self.h.check().ok


def homotopy_between(f0: Morphism, f1: Morphism, order=None) -> HomotopyWitness | None:
    """Solve for an R-linear ``h`` with ``d h + h d = f0 - f1``; None if impossible."""
    if f0.source is not f1.source or f0.target is not f1.target or f0.shift or f1.shift:
        raise InputError("homotopy needs two parallel degree 0 maps")
    S = MapSpace(f0.source, f0.target, -1)
    rows = S.linearity_rows()
    rhs = [0] * len(rows)
    delta = (f0 - f1).images
    for row, (d, i, k) in S.chain_rows():
        rows.append(row)
        rhs.append(delta[d][i].get(k, 0))
    x, _ = _solve_rows(rows, rhs, S.dim, order)
    if x is None:
        return None
    return HomotopyWitness(f0, f1, S.morphism(x))
