"""Cohomology of graded objects, cup products, Poincaré duality and Massey products."""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .algebra import DegreewiseAlgebra, Element, GradedSpace
from .errors import InputError, InternalError, PreconditionError
from .linalg import Matrix, RowEchelon, Subspace, fmt, kernel_basis, solve, vaxpy


# -- degreewise cohomology --------------------------------------------------------

class _DegreeData:
    __slots__ = ("reps", "ech", "zdim", "bdim")

    def __init__(self, reps, ech, zdim, bdim):
        self.reps, self.ech, self.zdim, self.bdim = reps, ech, zdim, bdim


def _valid_lo(obj) -> int:
    return getattr(obj, "valid_lo", obj.lo)


def _check_window(obj: GradedSpace, lo: int, hi: int):
    if hi < lo:
        raise InputError("empty window %d..%d" % (lo, hi))
    if hasattr(obj, "valid_lo") and lo < obj.valid_lo:
        raise InputError("window starts at %d, below the computed range %d" % (lo, obj.valid_lo))
    if obj.truncated and hi > obj.valid_hi:
        raise InputError("window %d..%d exceeds the valid bound %d of a truncated object "
                         "(cohomology is only faithful through N-1)" % (lo, hi, obj.valid_hi))


def _degree_data(obj: GradedSpace, d: int) -> _DegreeData:
    cache = obj.__dict__.setdefault("_h_cache", {})
    hit = cache.get(d)
    if hit is not None:
        return hit
    n = obj.dim(d)
    ech = RowEchelon(n)
    bdim = 0
    if obj.dim(d - 1) and obj.lo <= d - 1:
        for i in range(obj.dim(d - 1)):
            img = obj.diff_image(d - 1, i)
            if img and ech.add(img, tag=("b", i))[0]:
                bdim += 1
    reps = []
    zdim = 0
    if n:
        Z = kernel_basis(obj.diff_matrix(d)) if obj.dim(d + 1) else Subspace(n, [{i: mpq(1)} for i in range(n)], check=False)
        zdim = Z.dim
        for z in Z.basis:
            if ech.add(z, tag=("h", len(reps)))[0]:
                reps.append(dict(z))
    data = _DegreeData(reps, ech, zdim, bdim)
    cache[d] = data
    return data


@dataclass
class Cohomology:
    """Betti numbers and cocycle representatives of a graded object in a window."""
    space: GradedSpace
    lo: int
    hi: int

    def _data(self, d):
        if d < self.space.lo or d > self.space.hi:
            return None
        return _degree_data(self.space, d)

    def dim(self, d: int) -> int:
        data = self._data(d)
        return len(data.reps) if data else 0

    @property
    def betti(self) -> list[int]:
        return [self.dim(d) for d in range(self.lo, self.hi + 1)]

    def representatives(self, d: int) -> list[Element]:
        data = self._data(d)
        return [Element(self.space, d, r) for r in data.reps] if data else []

    def coordinates(self, x: Element) -> list:
        """Coordinates of the class of a cocycle in the representative basis."""
        if x.space is not self.space:
            raise InputError("element is not in this space")
        d = x.degree
        data = self._data(d)
        if data is None:
            return []
        if not x.d().is_zero() and d + 1 <= self.space.hi:
            raise InputError("%r is not a cocycle" % (x,))
        rem, comb = data.ech.reduce(x.coeffs)
        if rem:
            raise InputError("%r is not a cocycle" % (x,))
        return [comb.get(("h", j), mpq(0)) for j in range(len(data.reps))]

    def is_coboundary(self, x: Element) -> bool:
        return not any(self.coordinates(x))

    def element(self, d: int, coords) -> Element:
        out = {}
        for c, r in zip(coords, self._data(d).reps if self._data(d) else ()):
            vaxpy(out, r, c)
        return Element(self.space, d, out)


def cohomology(obj: GradedSpace, window: tuple[int, int] | None = None) -> Cohomology:
    """Degreewise cohomology with representatives (first basis completion of B^d to Z^d)."""
    if window is None:
        window = (_valid_lo(obj), obj.valid_hi)
    lo, hi = window
    _check_window(obj, lo, hi)
    H = Cohomology(obj, lo, hi)
    for d in range(lo, hi + 1):
        H._data(d)
    return H


def euler_characteristic(dims, lo: int = 0) -> int:
    """Alternating sum of a dimension list starting in degree ``lo``, or of a ``{degree: dim}`` map."""
    items = dims.items() if isinstance(dims, dict) else enumerate(dims, lo)
    return sum(-x if i % 2 else x for i, x in items)


# -- rings ---------------------------------------------------------------------------

class CohomologyRing:
    """A connected graded-commutative ring given by a basis per degree and structure constants.

    Rings computed from an algebra keep the cocycle representatives in
    ``reps`` and the algebra in ``source``; quotient rings have neither.
    ``mult`` only covers products landing inside ``0..hi``.
    """

    def __init__(self, names: dict, mult: dict, hi: int, *, reps: dict | None = None,
                 source: GradedSpace | None = None, formal_dimension: int | None = None, name: str = ""):
        self.hi = hi
        self.names = {d: tuple(names.get(d, ())) for d in range(hi + 1)}
        self.mult = {k: v for k, v in mult.items() if v}
        self.reps = reps
        self.source = source
        self.formal_dimension = formal_dimension
        self.name = name
        self._cohomology = None

    def dim(self, d: int) -> int:
        return len(self.names.get(d, ()))

    @property
    def betti(self) -> list[int]:
        return [self.dim(d) for d in range(self.hi + 1)]

    def basis_mul(self, d, i, e, j) -> dict:
        if d + e > self.hi:
            return {}
        if d == 0:
            return {j: mpq(1)}
        if e == 0:
            return {i: mpq(1)}
        return self.mult.get((d, i, e, j), {})

    def mul(self, d: int, u: dict, e: int, v: dict) -> dict:
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                vaxpy(out, self.basis_mul(d, i, e, j), a * b)
        return out

    def product_matrix(self, d: int, e: int) -> Matrix:
        """Rows: H^d (x) H^e basis pairs; columns: H^{d+e} coordinates."""
        rows = [self.basis_mul(d, i, e, j) for i in range(self.dim(d)) for j in range(self.dim(e))]
        return Matrix(len(rows), self.dim(d + e), rows)

    def class_of(self, x: Element) -> dict:
        if self._cohomology is None:
            raise InputError("ring has no underlying cochain algebra")
        coords = self._cohomology.coordinates(x)
        return {i: c for i, c in enumerate(coords) if c}

    def representative(self, d: int, coords: dict) -> Element:
        if self.reps is None:
            raise InputError("ring has no representatives")
        out = {}
        for i, c in coords.items():
            vaxpy(out, self.reps[d][i].coeffs, c)
        return Element(self.source, d, out)

    def check(self) -> list[str]:
        """Graded commutativity and associativity failures within bound."""
        fails = []
        degs = [d for d in range(1, self.hi + 1) if self.dim(d)]
        for d in degs:
            for e in degs:
                if d + e > self.hi:
                    continue
                sgn = -1 if d * e % 2 else 1
                for i in range(self.dim(d)):
                    for j in range(self.dim(e)):
                        ab = self.basis_mul(d, i, e, j)
                        ba = {k: sgn * c for k, c in self.basis_mul(e, j, d, i).items()}
                        if ab != ba:
                            fails.append("commutativity at (%d,%d),(%d,%d)" % (d, i, e, j))
                for f in degs:
                    if d + e + f > self.hi:
                        continue
                    for i in range(self.dim(d)):
                        for j in range(self.dim(e)):
                            ab = self.basis_mul(d, i, e, j)
                            for k in range(self.dim(f)):
                                left = self.mul(d + e, ab, f, {k: 1})
                                right = self.mul(d, {i: 1}, e + f, self.basis_mul(e, j, f, k))
                                if left != right:
                                    fails.append("associativity at (%d,%d),(%d,%d),(%d,%d)" % (d, i, e, j, f, k))
        return fails

    def as_algebra(self) -> DegreewiseAlgebra:
        """The ring as a zero-differential CDGA (degrees ``0..hi``, truncated above)."""
        basis = {d: list(self.names[d]) for d in range(self.hi + 1)}
        if basis[0] != ["1"]:
            basis[0] = ["1"]
        return DegreewiseAlgebra(basis, self.mult, None, truncated=True, name=self.name, check=False)

    def __repr__(self):
        return "CohomologyRing(%s betti=%s)" % (self.name, self.betti)


def _class_names(A: GradedSpace, d: int, reps: list[dict]) -> list[str]:
    out = []
    for r in reps:
        out.append("[%r]" % (Element(A, d, r),))
    return out


def cup_structure(A: DegreewiseAlgebra, window: tuple[int, int] | None = None,
                  formal_dimension: int | None = None) -> CohomologyRing:
    """The cohomology ring of ``A`` through the top of the window."""
    if window is None:
        window = (0, A.valid_hi)
    lo, hi = window
    if lo != 0:
        raise InputError("cup structure needs a window starting at degree 0")
    H = cohomology(A, (0, hi))
    reps = {d: H.representatives(d) for d in range(hi + 1)}
    names = {d: _class_names(A, d, [r.coeffs for r in reps[d]]) for d in range(hi + 1)}
    if names[0]:
        names[0] = ["1"]
    mult = {}
    for d in range(1, hi + 1):
        for e in range(1, hi + 1 - d):
            for i, x in enumerate(reps[d]):
                for j, y in enumerate(reps[e]):
                    p = x * y
                    c = H.coordinates(p)
                    v = {k: a for k, a in enumerate(c) if a}
                    if v:
                        mult[(d, i, e, j)] = v
    R = CohomologyRing(names, mult, hi, reps=reps, source=A, formal_dimension=formal_dimension,
                       name="H(%s)" % (A.name or "A"))
    R._cohomology = H
    return R


def induced_map(f, d: int, Hs: Cohomology | None = None, Ht: Cohomology | None = None) -> Matrix:
    """Matrix of ``H^d(f)`` in representative bases."""
    Hs = Hs or cohomology(f.source, (d, d))
    Ht = Ht or cohomology(f.target, (d + f.shift, d + f.shift))
    cols = []
    for x in Hs.representatives(d):
        c = Ht.coordinates(f.apply(x))
        cols.append({k: a for k, a in enumerate(c) if a})
    return Matrix.from_columns(Ht.dim(d + f.shift), cols)


def is_quasi_iso(f, window: tuple[int, int]) -> bool:
    """True iff ``H^d(f)`` is an isomorphism for every ``d`` in the window."""
    lo, hi = window
    if not f.check().ok:
        raise InputError("is_quasi_iso needs a chain map")
    Hs = cohomology(f.source, window)
    Ht = cohomology(f.target, (lo + f.shift, hi + f.shift))
    for d in range(lo, hi + 1):
        if Hs.dim(d) != Ht.dim(d + f.shift):
            return False
        if induced_map(f, d, Hs, Ht).rank() != Hs.dim(d):
            return False
    return True


# -- Poincaré duality ----------------------------------------------------------------

@dataclass
class PoincareResult:
    ok: bool
    n: int
    failures: list = field(default_factory=list)
    witness: tuple | None = None  # (degree, coordinates)

    def __bool__(self):
        return self.ok


def poincare_check(ring: CohomologyRing, n: int) -> PoincareResult:
    """Check that ``H^d x H^{n-d} -> H^n = Q`` is a perfect pairing for all ``d``."""
    if n > ring.hi:
        raise InputError("ring is only known through degree %d < %d" % (ring.hi, n))
    if ring.dim(n) != 1:
        raise PreconditionError("Poincaré duality check needs dim H^%d = 1, found %d" % (n, ring.dim(n)))
    res = PoincareResult(True, n)
    for d in range(0, n // 2 + 1):
        e = n - d
        a, b = ring.dim(d), ring.dim(e)
        rows = [[ring.basis_mul(d, i, e, j).get(0, mpq(0)) for j in range(b)] for i in range(a)]
        P = Matrix.from_dense(rows, b) if a else Matrix(0, b)
        r = P.rank()
        if a == b and r == a:
            continue
        res.ok = False
        res.failures.append("pairing H^%d x H^%d has rank %d (dims %d, %d)" % (d, e, r, a, b))
        if res.witness is None:
            # a class pairing to zero with everything
            if r < a:
                ker = kernel_basis(P.transpose()).basis
                res.witness = (d, ker[0])
            else:
                ker = kernel_basis(P).basis
                res.witness = (e, ker[0])
    return res


# -- Massey products ---------------------------------------------------------------

@dataclass
class MasseyReport:
    inputs: tuple
    degree: int
    xi: Element
    eta: Element
    representative: Element
    representative_class: list
    indeterminacy: Subspace
    contains_zero: bool

    @property
    def nontrivial(self) -> bool:
        return not self.contains_zero

    def as_dict(self) -> dict:
        return {
            "inputs": [repr(x) for x in self.inputs],
            "degree": self.degree,
            "representative": repr(self.representative),
            "representative_class": [fmt(c) for c in self.representative_class],
            "indeterminacy_dim": self.indeterminacy.dim,
            "contains_zero": self.contains_zero,
        }


def _bounding(A: DegreewiseAlgebra, target: Element, what: str, order=None) -> Element:
    d = target.degree
    if target.is_zero():
        return A.zero(d - 1)
    M = A.diff_matrix(d - 1)
    x, _ = solve(M, target.coeffs, order)
    if x is None:
        raise PreconditionError("%s is not zero in cohomology" % what)
    return Element(A, d - 1, x)


def massey_triple(A: DegreewiseAlgebra, a, b, c, *, xi: Element | None = None,
                  eta: Element | None = None, order=None) -> MasseyReport:
    """The triple Massey product of the classes of cocycles ``a, b, c``.

    Representative ``xi*c - (-1)^{|a|} a*eta`` with ``d xi = a*b`` and
    ``d eta = b*c``; indeterminacy ``[a] H + H [c]``.
    """
    a, b, c = (A.element(x) if not isinstance(x, Element) else x for x in (a, b, c))
    for x in (a, b, c):
        if x.space is not A:
            raise InputError("Massey inputs must live in the algebra")
        if x.is_zero():
            continue
        if x.degree + 1 <= A.hi and not x.d().is_zero():
            raise InputError("%r is not a cocycle" % (x,))
    D = a.degree + b.degree + c.degree - 1
    if A.truncated and D > A.valid_hi:
        raise InputError("Massey product lands in degree %d, beyond the valid bound %d" % (D, A.valid_hi))
    ab, bc = a * b, b * c
    if xi is None:
        xi = _bounding(A, ab, "[a][b]", order)
    elif xi.d() != ab:
        raise InputError("d(xi) != a*b")
    if eta is None:
        eta = _bounding(A, bc, "[b][c]", order)
    elif eta.d() != bc:
        raise InputError("d(eta) != b*c")
    sign = -1 if a.degree % 2 else 1
    rep = xi * c - sign * (a * eta)
    if D > A.hi:
        empty = Subspace(0, [], check=False)
        return MasseyReport((a, b, c), D, xi, eta, A.zero(D), [], empty, True)
    H = cohomology(A, (0, min(D, A.valid_hi)))
    if not rep.d().is_zero() and D + 1 <= A.hi:
        raise InternalError("Massey representative is not a cocycle")
    rc = H.coordinates(rep)
    gens = []
    for y in H.representatives(b.degree + c.degree - 1):
        gens.append(H.coordinates(a * y))
    for y in H.representatives(a.degree + b.degree - 1):
        gens.append(H.coordinates(y * c))
    n = H.dim(D)
    ech = RowEchelon(n)
    for g in gens:
        ech.add({k: v for k, v in enumerate(g) if v})
    indet = Subspace(n, ech.basis(), check=False)
    contains_zero = indet.contains({k: v for k, v in enumerate(rc) if v})
    return MasseyReport((a, b, c), D, xi, eta, rep, rc, indet, contains_zero)
