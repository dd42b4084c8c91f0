"""Degreewise CDGAs: explicit bases, structure constants and differentials.

An algebra is stored in degrees ``0..N``.  Products landing above ``N`` are
dropped, which is the quotient by the ideal ``A^{>N}``; when the
algebra genuinely vanishes above ``N`` it is flagged ``truncated=False`` and
cohomology is valid through degree ``N`` instead of ``N - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import expr as _expr
from .errors import InputError, PresentationError, ValidationError
from .linalg import Matrix, Q, Subspace, fmt, kernel_basis, vaxpy, vscale


class Element:
    """A homogeneous element of a graded space."""

    __slots__ = ("space", "degree", "coeffs")

    def __init__(self, space, degree: int, coeffs: dict | None = None):
        self.space = space
        self.degree = degree
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other):
        if not isinstance(other, Element) or other.space is not self.space:
            raise InputError("elements live in different spaces")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise InputError("cannot add elements of degrees %d and %d" % (self.degree, other.degree))
        out = dict(self.coeffs)
        vaxpy(out, other.coeffs, 1)
        return Element(self.space, self.degree, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.space, self.degree, vscale(self.coeffs, -1))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        if isinstance(c, Element):
            return c.__mul__(self)
        return Element(self.space, self.degree, vscale(self.coeffs, c))

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.__rmul__(other)
        if other.space is self.space and isinstance(self.space, DegreewiseAlgebra):
            return self.space.product(self, other)
        base = getattr(other.space, "base", None)
        if base is self.space:
            return other.space.act(self, other)
        raise InputError("no product between these elements")

    def d(self) -> "Element":
        return self.space.differential(self)

    def __eq__(self, other):
        if not isinstance(other, Element) or other.space is not self.space:
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.space), self.degree, frozenset(self.coeffs.items())))

    def vector(self) -> list:
        return [self.coeffs.get(i, mpq(0)) for i in range(self.space.dim(self.degree))]

    def __repr__(self):
        if self.is_zero():
            return "0"
        names = self.space.basis.get(self.degree, ())
        parts = []
        for i in sorted(self.coeffs):
            c = self.coeffs[i]
            name = names[i]
            if name == "1":
                term = fmt(c)
            elif c == 1:
                term = name
            elif c == -1:
                term = "-" + name
            else:
                term = "%s*%s" % (fmt(c), name)
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")


class GradedSpace:
    """Finite graded vector space with a degree +1 differential on a basis."""

    def __init__(self, lo: int, hi: int, basis: dict, diff: dict | None,
                 truncated: bool, name: str = ""):
        if hi < lo:
            raise InputError("empty degree range [%d, %d]" % (lo, hi))
        self.lo, self.hi = lo, hi
        self.basis = {d: tuple(basis.get(d, ())) for d in range(lo, hi + 1)}
        self.truncated = truncated
        self.name = name
        self._diff = {}
        diff = diff or {}
        for d in range(lo, hi + 1):
            rows = diff.get(d)
            if rows is None:
                rows = [{} for _ in self.basis[d]]
            rows = [{k: Q(v) for k, v in r.items() if v} for r in rows]
            if len(rows) != len(self.basis[d]):
                raise InputError("differential in degree %d has %d rows for %d basis elements"
                                 % (d, len(rows), len(self.basis[d])))
            tdim = len(self.basis.get(d + 1, ()))
            for r in rows:
                for k in r:
                    if not 0 <= k < tdim:
                        raise InputError("differential degree violation: image of a degree-%d "
                                         "element lies outside degree %d" % (d, d + 1))
            self._diff[d] = rows
        self._index = {}
        for d, names in self.basis.items():
            for i, nm in enumerate(names):
                self._index.setdefault(nm, (d, i))

    # -- basic queries
    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def total_dim(self) -> int:
        return sum(len(b) for b in self.basis.values())

    @property
    def valid_hi(self) -> int:
        """Highest degree whose cohomology is faithful."""
        return self.hi - 1 if self.truncated else self.hi

    def zero(self, d: int) -> Element:
        return Element(self, d, {})

    def basis_element(self, d_or_name, i: int | None = None) -> Element:
        if i is None:
            if d_or_name not in self._index:
                raise InputError("no basis element named %r" % (d_or_name,))
            d, i = self._index[d_or_name]
        else:
            d = d_or_name
        return Element(self, d, {i: mpq(1)})

    def find(self, name: str):
        return self._index.get(name)

    def basis_elements(self, d: int) -> list[Element]:
        return [Element(self, d, {i: mpq(1)}) for i in range(self.dim(d))]

    def from_vector(self, d: int, vec) -> Element:
        if isinstance(vec, dict):
            return Element(self, d, vec)
        if len(vec) != self.dim(d):
            raise InputError("vector length %d does not match dim %d" % (len(vec), self.dim(d)))
        return Element(self, d, {i: Q(x) for i, x in enumerate(vec) if x})

    def diff_image(self, d: int, i: int) -> dict:
        rows = self._diff.get(d)
        return rows[i] if rows is not None else {}

    def differential(self, x: Element) -> Element:
        out = {}
        for i, c in x.coeffs.items():
            vaxpy(out, self.diff_image(x.degree, i), c)
        return Element(self, x.degree + 1, out)

    def diff_matrix(self, d: int) -> Matrix:
        """Matrix of d: degree d -> degree d+1 (columns indexed by basis[d])."""
        return Matrix.from_columns(self.dim(d + 1), [self.diff_image(d, i) for i in range(self.dim(d))])

    def cocycles(self, d: int) -> Subspace:
        return kernel_basis(self.diff_matrix(d))

    # -- symbolic elements
    generators: tuple = ()

    def _generator_tables(self):
        degs = {n: g for n, g in self.generators}
        order = {n: i for i, (n, _) in enumerate(self.generators)}
        return degs, order

    def _word_degree(self, word) -> int:
        degs, _ = self._generator_tables()
        total = 0
        for s in word:
            if s in degs:
                total += degs[s]
            elif s in self._index:
                total += self._index[s][0]
            else:
                raise InputError("unknown symbol %r in %s" % (s, self.name or "space"))
        return total

    def _word_element(self, word) -> Element:
        if not word:
            return self.unit_element()
        degs, order = self._generator_tables()
        try:
            sign, exps = _expr.normalize_word(word, degs, order)
        except KeyError:
            sign, exps = None, None
        if sign == 0:
            return self.zero(self._word_degree(word))
        if exps is not None:
            hit = self._index.get(_expr.monomial_name(exps))
            if hit is not None:
                return Element(self, hit[0], {hit[1]: mpq(sign)})
        joined = "*".join(word)
        if joined in self._index:
            return self.basis_element(joined)
        # fall back to multiplying the factors
        factors = []
        for s in word:
            if s not in self._index:
                if s in degs:
                    return self.zero(self._word_degree(word))
                raise InputError("unknown symbol %r in %s" % (s, self.name or "space"))
            factors.append(self.basis_element(s))
        out = factors[0]
        for f in factors[1:]:
            out = out * f
        return out

    def unit_element(self) -> Element:
        raise InputError("scalar terms need a unit")

    def element(self, text, constants: dict | None = None) -> Element:
        """Evaluate a polynomial expression over generator or basis names."""
        if isinstance(text, Element):
            return text
        terms = _expr.parse(text, constants)
        if not terms:
            raise InputError("expression %r is zero; give its degree explicitly" % (text,))
        out = None
        for c, word in terms:
            e = c * self._word_element(word)
            if out is None:
                out = e
            elif e.is_zero():
                continue
            elif out.is_zero():
                out = e
            elif e.degree != out.degree:
                raise InputError("inhomogeneous expression %r" % (text,))
            else:
                out = out + e
        return out


class DegreewiseAlgebra(GradedSpace):
    """A connected CDGA stored degreewise in degrees ``0..N``.

    ``mult`` maps ``(d, i, e, j)`` with ``d, e >= 1`` to the sparse product
    vector in degree ``d + e``; missing keys are zero products.  ``basis[0]``
    must be the single unit ``"1"``.
    """

    def __init__(self, basis: dict, mult: dict, diff: dict | None = None, *,
                 generators: Sequence = (), truncated: bool = True, name: str = "",
                 check: bool = True):
        N = max(basis) if basis else 0
        super().__init__(0, N, basis, diff, truncated, name)
        if self.basis[0] != ("1",):
            raise InputError("algebras must be connected with basis[0] = ('1',)")
        self.generators = tuple((str(n), int(g)) for n, g in generators)
        self._mult = {}
        for (d, i, e, j), v in mult.items():
            if d == 0 or e == 0 or d + e > N:
                continue
            v = {k: Q(x) for k, x in v.items() if x}
            if v:
                self._mult[(d, i, e, j)] = v
        if check:
            report = validate(self)
            if not report.ok:
                raise ValidationError(report)

    @property
    def top_degree(self) -> int:
        return self.hi

    def unit_element(self) -> Element:
        return Element(self, 0, {0: mpq(1)})

    def basis_mul(self, d: int, i: int, e: int, j: int) -> dict:
        if d == 0:
            return {j: mpq(1)} if e <= self.hi else {}
        if e == 0:
            return {i: mpq(1)}
        if d + e > self.hi:
            return {}
        return self._mult.get((d, i, e, j), {})

    def product(self, x: Element, y: Element) -> Element:
        deg = x.degree + y.degree
        out = {}
        if deg <= self.hi:
            for i, a in x.coeffs.items():
                for j, b in y.coeffs.items():
                    vaxpy(out, self.basis_mul(x.degree, i, y.degree, j), a * b)
        return Element(self, deg, out)

    def power(self, x: Element, p: int) -> Element:
        out = self.unit_element()
        for _ in range(p):
            out = out * x
        return out

    def mult_items(self):
        return self._mult.items()

    def __repr__(self):
        dims = ",".join(str(self.dim(d)) for d in self.degrees())
        return "DegreewiseAlgebra(%s dims=(%s)%s)" % (self.name, dims, " truncated" if self.truncated else "")


# -- validation -----------------------------------------------------------

@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    limit: int = 50

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        if len(self.failures) < self.limit:
            self.failures.append(msg)
        elif len(self.failures) == self.limit:
            self.failures.append("... further failures suppressed")

    def count(self, key: str, n: int = 1):
        self.checks[key] = self.checks.get(key, 0) + n

    def __str__(self):
        if self.ok:
            return "valid (%s)" % ", ".join("%s: %d" % kv for kv in sorted(self.checks.items()))
        return "invalid: " + "; ".join(self.failures)


def _name(A, d, i):
    return A.basis[d][i]


def _vec_str(A, d, v):
    return repr(Element(A, d, v))


def validate(obj) -> ValidationReport:
    """Check every CDGA (or dgmodule) axiom on basis elements within bound."""
    from .modules import DgModule
    if isinstance(obj, Presentation):
        return obj.validate()
    if isinstance(obj, DgModule):
        return obj.validate()
    A = obj
    rep = ValidationReport()
    N = A.hi
    if A.basis.get(0) != ("1",):
        rep.fail("not connected: basis[0] = %r" % (A.basis.get(0),))
    if A.diff_image(0, 0):
        rep.fail("d(1) = %s != 0" % _vec_str(A, 1, A.diff_image(0, 0)))
    for key in A._mult:
        d, i, e, j = key
        if not (i < A.dim(d) and j < A.dim(e)):
            rep.fail("structure constant index out of range at %r" % (key,))
    # d o d = 0
    for d in range(0, N - 1):
        for i in range(A.dim(d)):
            dd = {}
            for k, c in A.diff_image(d, i).items():
                vaxpy(dd, A.diff_image(d + 1, k), c)
            rep.count("d^2")
            if dd:
                rep.fail("d^2(%s) = %s" % (_name(A, d, i), _vec_str(A, d + 2, dd)))
    degs = [d for d in range(1, N + 1) if A.dim(d)]
    # graded commutativity
    for d in degs:
        for e in degs:
            if e < d or d + e > N:
                continue
            sgn = -1 if (d * e) % 2 else 1
            for i in range(A.dim(d)):
                for j in range(A.dim(e)):
                    if d == e and j < i:
                        continue
                    rep.count("commutativity")
                    ab = A.basis_mul(d, i, e, j)
                    ba = A.basis_mul(e, j, d, i)
                    if vscale(ba, sgn) != ab:
                        rep.fail("%s*%s != (-1)^{%d*%d} %s*%s" % (
                            _name(A, d, i), _name(A, e, j), d, e, _name(A, e, j), _name(A, d, i)))
    # associativity
    for d in degs:
        for e in degs:
            if d + e > N:
                continue
            for f in degs:
                if d + e + f > N:
                    continue
                for i in range(A.dim(d)):
                    for j in range(A.dim(e)):
                        ab = A.basis_mul(d, i, e, j)
                        for k in range(A.dim(f)):
                            rep.count("associativity")
                            left = {}
                            for t, c in ab.items():
                                vaxpy(left, A.basis_mul(d + e, t, f, k), c)
                            right = {}
                            for t, c in A.basis_mul(e, j, f, k).items():
                                vaxpy(right, A.basis_mul(d, i, e + f, t), c)
                            if left != right:
                                rep.fail("(%s*%s)*%s != %s*(%s*%s)" % (
                                    _name(A, d, i), _name(A, e, j), _name(A, f, k),
                                    _name(A, d, i), _name(A, e, j), _name(A, f, k)))
    # Leibniz
    for d in degs:
        for e in degs:
            if d + e > N - 1 or e < d:
                continue
            sgn = -1 if d % 2 else 1
            for i in range(A.dim(d)):
                da = A.diff_image(d, i)
                for j in range(A.dim(e)):
                    if d == e and j < i:
                        continue
                    rep.count("leibniz")
                    lhs = {}
                    for t, c in A.basis_mul(d, i, e, j).items():
                        vaxpy(lhs, A.diff_image(d + e, t), c)
                    rhs = {}
                    for t, c in da.items():
                        vaxpy(rhs, A.basis_mul(d + 1, t, e, j), c)
                    for t, c in A.diff_image(e, j).items():
                        vaxpy(rhs, A.basis_mul(d, i, e + 1, t), sgn * c)
                    if lhs != rhs:
                        rep.fail("Leibniz fails on %s, %s: d(ab) = %s but (da)b +- a(db) = %s" % (
                            _name(A, d, i), _name(A, e, j),
                            _vec_str(A, d + e + 1, lhs), _vec_str(A, d + e + 1, rhs)))
    return rep


# -- presentations -----------------------------------------------------------

def _parse_relation(rel, degs: dict):
    if isinstance(rel, (tuple, list)):
        g, p = rel
        return str(g), int(p)
    terms = _expr.parse(rel)
    if len(terms) != 1:
        raise InputError("unsupported relation shape %r: only powers of a single generator" % (rel,))
    _, word = terms[0]
    if not word or len(set(word)) != 1:
        raise InputError("unsupported relation shape %r: only powers of a single generator" % (rel,))
    g = word[0]
    if g not in degs:
        raise InputError("relation %r mentions unknown generator %r" % (rel, g))
    return g, len(word)


def _monomials(gens, caps, N):
    """Exponent vectors of total degree <= N, grouped by degree."""
    out = {d: [] for d in range(N + 1)}

    def rec(idx, deg, exps):
        if idx == len(gens):
            out[deg].append(tuple(exps))
            return
        g = gens[idx][1]
        p = 0
        while p <= caps[idx] and deg + p * g <= N:
            exps.append(p)
            rec(idx + 1, deg + p * g, exps)
            exps.pop()
            p += 1

    rec(0, 0, [])
    for d in out:
        # lexicographic by exponents, reversed so earlier generators come first
        out[d].sort(key=lambda e: tuple(-x for x in e))
    return out


def _free_gca(gens, caps, N):
    """Basis, index and structure constants of the truncated free graded-commutative algebra."""
    mons = _monomials(gens, caps, N)
    names = {d: [_expr.monomial_name([(gens[k][0], e[k]) for k in range(len(gens))]) for e in mons[d]]
             for d in mons}
    index = {e: (d, i) for d, es in mons.items() for i, e in enumerate(es)}
    odd = [g % 2 == 1 for _, g in gens]
    mult = {}
    for d in range(1, N + 1):
        for e in range(d, N + 1 - d):
            for i, m1 in enumerate(mons[d]):
                for j, m2 in enumerate(mons[e]):
                    prod = tuple(a + b for a, b in zip(m1, m2))
                    hit = index.get(prod)
                    if hit is None or any(o and p > 1 for o, p in zip(odd, prod)):
                        continue
                    # sign: move m2's odd generators left past m1's later odd generators
                    s = 0
                    for k2 in range(len(gens)):
                        if odd[k2] and m2[k2]:
                            s += sum(m1[k1] for k1 in range(k2 + 1, len(gens)) if odd[k1])
                    sign = mpq(-1 if s % 2 else 1)
                    mult[(d, i, e, j)] = {hit[1]: sign}
                    if (d, i) != (e, j):
                        sign2 = sign * (-1 if (d * e) % 2 else 1)
                        mult[(e, j, d, i)] = {hit[1]: sign2}
    return mons, names, index, mult


@dataclass
class Presentation:
    """Generators, differential on generators, power truncations and a top degree."""
    generators: list
    differential: dict = field(default_factory=dict)
    relations: list = field(default_factory=list)
    top_degree: int = 0
    name: str = ""

    def build(self, check: bool = True) -> DegreewiseAlgebra:
        return cdga_from_presentation(self.generators, self.differential, self.relations,
                                      self.top_degree, name=self.name, check=check)

    def validate(self) -> ValidationReport:
        try:
            A = self.build(check=False)
        except InputError as exc:
            rep = ValidationReport()
            rep.fail(str(exc))
            return rep
        return validate(A)


def cdga_from_presentation(generators, diff: dict | None, relations: Iterable, N: int,
                           name: str = "", check: bool = True) -> DegreewiseAlgebra:
    """Build ``(Lambda(generators)/(g^p, ...), d)`` in degrees ``<= N``.

    ``diff`` maps generator names to polynomial expressions (strings) and is
    extended to the whole algebra by the Leibniz rule.
    """
    gens = [(str(n), int(g)) for n, g in generators]
    if N < 0:
        raise InputError("top degree must be >= 0")
    seen = set()
    for n, g in gens:
        if g < 1:
            raise InputError("generator %s has degree %d; only connected algebras (degree >= 1) are supported" % (n, g))
        if n in seen:
            raise InputError("duplicate generator %r" % n)
        seen.add(n)
    degs = dict(gens)
    true_caps: list = [1 if g % 2 else None for _, g in gens]
    for rel in relations or ():
        g, p = _parse_relation(rel, degs)
        k = [n for n, _ in gens].index(g)
        true_caps[k] = p - 1 if true_caps[k] is None else min(true_caps[k], p - 1)
    # finite only if every even generator is power-truncated
    truncated = (any(c is None for c in true_caps)
                 or sum(c * g for c, (_, g) in zip(true_caps, gens)) > N)
    caps = [N // g if c is None else min(c, N // g) for c, (_, g) in zip(true_caps, gens)]

    mons, names, index, mult = _free_gca(gens, caps, N)
    basis = {d: names[d] for d in range(N + 1)}
    A0 = DegreewiseAlgebra(basis, mult, None, generators=gens, truncated=truncated,
                           name=name, check=False)

    # images of generators
    dgen = {}
    for gname, expr_text in (diff or {}).items():
        if gname not in degs:
            raise InputError("differential given for unknown generator %r" % gname)
        if expr_text in (None, "", 0, "0"):
            continue
        img = A0.element(str(expr_text))
        if not img.is_zero() and img.degree != degs[gname] + 1:
            raise PresentationError("differential degree violation: d(%s) = %s has degree %d, expected %d"
                                    % (gname, expr_text, img.degree, degs[gname] + 1))
        if degs[gname] + 1 <= N:
            dgen[gname] = img.coeffs

    # Leibniz extension: m = g * m' with g the first generator present
    dvals: dict = {}
    order = sorted(index, key=lambda e: sum(e))
    for m in order:
        d, i = index[m]
        k = next((t for t, x in enumerate(m) if x), None)
        if k is None:
            dvals[m] = {}
            continue
        gname, gdeg = gens[k]
        rest = list(m)
        rest[k] -= 1
        rest = tuple(rest)
        out = {}
        if d + 1 <= N:
            dg = dgen.get(gname, {})
            rd, ri = index[rest]
            for t, c in dg.items():
                vaxpy(out, A0.basis_mul(gdeg + 1, t, rd, ri), c)
            gd, gi = index[tuple(1 if t == k else 0 for t in range(len(gens)))]
            sgn = -1 if gdeg % 2 else 1
            for t, c in dvals[rest].items():
                vaxpy(out, A0.basis_mul(gd, gi, rd + 1, t), sgn * c)
        dvals[m] = out
    diffs = {d: [dvals[m] for m in mons[d]] for d in range(N + 1)}
    A = DegreewiseAlgebra(basis, mult, diffs, generators=gens, truncated=truncated,
                          name=name, check=False)
    if check:
        report = validate(A)
        if not report.ok:
            raise PresentationError("presentation does not define a CDGA: %s" % report)
    return A


def truncated_polynomial(name: str, gen_degree: int, power: int, N: int) -> DegreewiseAlgebra:
    """``Lambda(a)/(a^power)`` with ``|a| = gen_degree`` even and zero differential."""
    if gen_degree % 2 or gen_degree <= 0:
        raise InputError("truncated polynomial generator must have positive even degree, got %d" % gen_degree)
    if power < 1:
        raise InputError("power must be >= 1")
    return cdga_from_presentation([(name, gen_degree)], {}, [(name, power)], N,
                                  name="%s^%d=0" % (name, power))


def _join(aname: str, gname: str, p: int) -> str:
    gpart = gname if p == 1 else "%s^%d" % (gname, p)
    if p == 0:
        return aname
    if aname == "1":
        return gpart
    return "%s*%s" % (aname, gpart)


def _extend_one(A: DegreewiseAlgebra, gname: str, gdeg: int, dg: Element | None, N: int,
                check: bool) -> DegreewiseAlgebra:
    """``A (x) Lambda(g)`` with ``d g = dg``, in degrees ``<= N``."""
    odd = gdeg % 2 == 1
    cap = 1 if odd else N // gdeg
    basis = {t: [] for t in range(N + 1)}
    index = {}
    for t in range(N + 1):
        for p in range(0, cap + 1):
            ad = t - p * gdeg
            if ad < 0:
                break
            for i in range(A.dim(ad)):
                index[(ad, i, p)] = (t, len(basis[t]))
                basis[t].append(_join(A.basis[ad][i], gname, p))
    mult = {}
    for (ad, i, p), (t, ti) in index.items():
        if t == 0:
            continue
        for (bd, j, q), (u, uj) in index.items():
            if u == 0 or t + u > N:
                continue
            if odd and p + q > 1:
                continue
            sgn = -1 if (p * gdeg * bd) % 2 else 1
            prod = A.basis_mul(ad, i, bd, j) if ad + bd <= A.hi else {}
            out = {}
            for k, c in prod.items():
                hit = index.get((ad + bd, k, p + q))
                if hit is not None:
                    out[hit[1]] = sgn * c
            if out:
                mult[(t, ti, u, uj)] = out
    diffs = {t: [None] * len(basis[t]) for t in range(N + 1)}
    dgv = dg.coeffs if dg is not None else {}
    dgdeg = gdeg + 1
    for (ad, i, p), (t, ti) in index.items():
        out = {}
        if t + 1 <= N:
            for k, c in A.diff_image(ad, i).items():
                hit = index.get((ad + 1, k, p))
                if hit is not None:
                    vaxpy(out, {hit[1]: c}, 1)
            if p and dgv:
                # (-1)^{|a|} p * (a . dg) g^{p-1}
                sgn = (-1 if ad % 2 else 1) * p
                for k, c in dgv.items():
                    for k2, c2 in A.basis_mul(ad, i, dgdeg, k).items() if ad + dgdeg <= A.hi else ():
                        hit = index.get((ad + dgdeg, k2, p - 1))
                        if hit is not None:
                            vaxpy(out, {hit[1]: c * c2}, sgn)
        diffs[t][ti] = out
    truncated = A.truncated or (not odd) or (A.hi + gdeg > N)
    return DegreewiseAlgebra(basis, mult, diffs, generators=A.generators + ((gname, gdeg),),
                             truncated=truncated, name=A.name, check=check)


def free_extension(A: DegreewiseAlgebra, new_gens: Sequence, N: int | None = None,
                   check: bool = True, name: str = "") -> DegreewiseAlgebra:
    """Relative Sullivan extension ``A (x) Lambda(new_gens)``.

    ``new_gens`` is a list of ``(name, degree, d_image)`` where ``d_image`` is
    an expression (or Element) in ``A (x) Lambda(previous new generators)``.
    """
    if N is None:
        N = A.hi
    if A.truncated:
        N = min(N, A.hi)
    B = A
    if B.hi < N:
        # pad an untruncated algebra with empty degrees
        basis = {d: list(B.basis.get(d, ())) for d in range(N + 1)}
        B = DegreewiseAlgebra(basis, dict(B.mult_items()), {d: B._diff.get(d) for d in range(B.hi + 1)},
                              generators=B.generators, truncated=False, name=B.name, check=False)
    existing = {n for n, _ in A.generators} | set(A._index)
    for gname, gdeg, dimg in new_gens:
        gdeg = int(gdeg)
        if gdeg < 1:
            raise InputError("generator %s has degree %d; only degree >= 1 is supported" % (gname, gdeg))
        if gname in existing:
            raise InputError("generator name %r already used" % gname)
        existing.add(gname)
        dg = None
        if dimg not in (None, "", 0, "0"):
            dg = dimg if isinstance(dimg, Element) else B.element(str(dimg))
            if dg.space is A and B is not A:
                dg = _transport(dg, B)
            if dg.space is not B:
                raise InputError("differential image of %s lives in the wrong algebra" % gname)
            if not dg.is_zero():
                if dg.degree != gdeg + 1:
                    raise PresentationError("differential degree violation: d(%s) has degree %d, expected %d"
                                            % (gname, dg.degree, gdeg + 1))
                if dg.degree + 1 <= B.valid_hi and not dg.d().is_zero():
                    raise PresentationError("d^2 != 0: d(%s) = %s is not a cocycle" % (gname, dg))
        B = _extend_one(B, gname, gdeg, dg, N, check=False)
    if name:
        B.name = name
    if check:
        report = validate(B)
        if not report.ok:
            raise PresentationError("extension does not define a CDGA: %s" % report)
    return B


def _transport(x: Element, B) -> Element:
    """Re-express an element of a subalgebra through basis names in ``B``."""
    out = {}
    for i, c in x.coeffs.items():
        d, j = B.find(x.space.basis[x.degree][i])
        out[j] = c
    return Element(B, x.degree, out)


def rational_point(N: int = 0) -> DegreewiseAlgebra:
    """The trivial CDGA Q concentrated in degree 0."""
    basis = {d: [] for d in range(N + 1)}
    basis[0] = ["1"]
    return DegreewiseAlgebra(basis, {}, None, truncated=False, name="Q")


def graded_algebra(basis: dict, products: dict, *, name: str = "", check: bool = True) -> DegreewiseAlgebra:
    """Zero-differential algebra from named basis elements and a product table.

    ``products`` maps ``(name1, name2)`` to ``{name: coeff}``; the opposite
    order is filled in by graded commutativity.
    """
    idx = {}
    for d, names in basis.items():
        for i, nm in enumerate(names):
            idx[nm] = (d, i)
    mult = {}
    for (n1, n2), val in products.items():
        d, i = idx[n1]
        e, j = idx[n2]
        out = {}
        for nm, c in val.items():
            t, k = idx[nm]
            if t != d + e:
                raise InputError("product %s*%s lands in the wrong degree" % (n1, n2))
            out[k] = Q(c)
        mult[(d, i, e, j)] = out
        sgn = -1 if (d * e) % 2 else 1
        mult.setdefault((e, j, d, i), vscale(out, sgn))
    return DegreewiseAlgebra(basis, mult, None, truncated=False, name=name, check=check)
