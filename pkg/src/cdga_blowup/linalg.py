"""Exact rational linear algebra.

Vectors are sparse ``dict[int, mpq]`` maps from coordinate to a nonzero
coefficient.  Everything here is exact; there is no floating point path.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import InputError

Scalar = mpq
SparseVec = dict


def Q(x) -> mpq:
    """Coerce ints, Fractions, mpq and "p/q" strings to an exact scalar."""
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    if isinstance(x, float):
        raise InputError("floats are not exact scalars: %r" % (x,))
    return mpq(x)


def fmt(x) -> str:
    x = mpq(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def _bits(x: mpq) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


# -- sparse vector helpers ---------------------------------------------------

def vadd(u: dict, v: dict, c=1) -> dict:
    """Return u + c*v."""
    out = dict(u)
    for k, x in v.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def vaxpy(u: dict, v: dict, c) -> None:
    """In place u += c*v."""
    for k, x in v.items():
        y = u.get(k, 0) + c * x
        if y:
            u[k] = y
        else:
            del u[k]


def vscale(v: dict, c) -> dict:
    c = Q(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def dense(v: dict, n: int) -> list:
    out = [mpq(0)] * n
    for k, x in v.items():
        out[k] = x
    return out


def sparse(seq: Sequence) -> dict:
    return {i: Q(x) for i, x in enumerate(seq) if x}


# -- matrices ------------------------------------------------------------------

class Matrix:
    """Immutable sparse matrix over Q, stored by rows."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        rows = [{c: Q(x) for c, x in r.items() if x} for r in rows]
        if len(rows) != nrows:
            raise InputError("expected %d rows, got %d" % (nrows, len(rows)))
        for r in rows:
            for c in r:
                if not 0 <= c < ncols:
                    raise InputError("column index %d out of range" % c)
        self.rows = tuple(rows)

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        entries = [list(r) for r in entries]
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        for r in entries:
            if len(r) != ncols:
                raise InputError("ragged matrix")
        return cls(len(entries), ncols, [sparse(r) for r in entries])

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[dict]) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(cols):
            for i, x in col.items():
                if x:
                    rows[i][j] = x
        return cls(nrows, len(cols), rows)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{i: mpq(1)} for i in range(n)])

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    def columns(self) -> list[dict]:
        cols = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def to_dense(self) -> list[list]:
        return [dense(r, self.ncols) for r in self.rows]

    def apply(self, v) -> dict:
        if not isinstance(v, dict):
            if len(v) != self.ncols:
                raise InputError("dimension mismatch: %d columns, vector of length %d" % (self.ncols, len(v)))
            v = sparse(v)
        out = {}
        for i, r in enumerate(self.rows):
            s = sum((x * v[j] for j, x in r.items() if j in v), mpq(0))
            if s:
                out[i] = s
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise InputError("dimension mismatch in product")
        rows = []
        for r in self.rows:
            acc = {}
            for k, x in r.items():
                vaxpy(acc, other.rows[k], x)
            rows.append(acc)
        return Matrix(self.nrows, other.ncols, rows)

    def transpose(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, self.columns())

    def rank(self) -> int:
        ech = RowEchelon(self.nrows)
        for col in self.columns():
            ech.add(col)
        return ech.rank

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __repr__(self):
        return "Matrix(%d x %d, nnz=%d)" % (self.nrows, self.ncols, sum(map(len, self.rows)))


class RowEchelon:
    """Incrementally maintained reduced echelon basis of a span.

    Each inserted vector may carry a tag; stored rows remember which
    combination of tagged inputs produced them, so :meth:`reduce` can express
    a vector in terms of the original inputs.  Pivots are chosen as the entry
    of smallest bit size, ties broken by ``priority`` (lower first).
    """

    def __init__(self, dim: int, priority: Sequence[int] | None = None):
        self.dim = dim
        self.pivot_rows: dict[int, tuple[dict, dict]] = {}
        self.order: list[int] = []
        self._prio = priority

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def reduce(self, vec: dict) -> tuple[dict, dict]:
        """Return ``(remainder, combination)`` with vec = remainder + sum c*input[tag]."""
        rem = {k: Q(x) for k, x in vec.items() if x}
        comb: dict = {}
        for p in [p for p in rem if p in self.pivot_rows]:
            c = rem.get(p)
            if not c:
                continue
            row, rc = self.pivot_rows[p]
            vaxpy(rem, row, -c)
            vaxpy(comb, rc, c)
        return rem, comb

    def _choose(self, rem: dict) -> int:
        if self._prio is None:
            return min(rem, key=lambda k: (_bits(rem[k]), k))
        return min(rem, key=lambda k: (_bits(rem[k]), self._prio[k], k))

    def add(self, vec: dict, tag=None) -> tuple[bool, dict]:
        """Insert a vector.  Returns (independent, combination).

        If dependent, ``combination`` expresses vec in terms of earlier tags.
        """
        rem, comb = self.reduce(vec)
        if not rem:
            return False, comb
        comb = vscale(comb, -1)
        if tag is not None:
            comb[tag] = comb.get(tag, 0) + 1
        p = self._choose(rem)
        inv = 1 / rem[p]
        rem = vscale(rem, inv)
        comb = vscale(comb, inv)
        for q, (row, rc) in self.pivot_rows.items():
            c = row.get(p)
            if c:
                vaxpy(row, rem, -c)
                vaxpy(rc, comb, -c)
        self.pivot_rows[p] = (rem, comb)
        self.order.append(p)
        return True, {}

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]

    def basis(self) -> list[dict]:
        return [dict(self.pivot_rows[p][0]) for p in self.order]


# -- subspaces -------------------------------------------------------------

class Subspace:
    """A subspace of Q^n given by an independent basis."""

    __slots__ = ("ambient_dim", "basis", "_ech")

    def __init__(self, ambient_dim: int, basis: Iterable = (), check: bool = True):
        vecs = [v if isinstance(v, dict) else sparse(v) for v in basis]
        vecs = [{k: Q(x) for k, x in v.items() if x} for v in vecs]
        ech = RowEchelon(ambient_dim)
        for i, v in enumerate(vecs):
            if any(not 0 <= k < ambient_dim for k in v):
                raise InputError("vector does not fit in ambient dimension %d" % ambient_dim)
            ok, _ = ech.add(v, tag=i)
            if check and not ok:
                raise InputError("subspace basis is not linearly independent")
        self.ambient_dim = ambient_dim
        self.basis = tuple(vecs)
        self._ech = ech

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        if not isinstance(v, dict):
            v = sparse(v)
        return self._ech.contains(v)

    def coordinates(self, v) -> list | None:
        """Coefficients of v in this basis, or None if v is not in the span."""
        if not isinstance(v, dict):
            v = sparse(v)
        rem, comb = self._ech.reduce(v)
        if rem:
            return None
        return [comb.get(i, mpq(0)) for i in range(self.dim)]

    def dense_basis(self) -> list[list]:
        return [dense(v, self.ambient_dim) for v in self.basis]

    def __repr__(self):
        return "Subspace(dim=%d in Q^%d)" % (self.dim, self.ambient_dim)


def solve(A: Matrix, b, order: Sequence[int] | None = None):
    """Solve A x = b exactly.

    Returns ``(x, kernel)``: a particular solution (or None when the system is
    inconsistent) and a basis of the null space.  ``order`` permutes the order
    in which unknowns are considered; it changes the particular solution and
    the kernel basis but not their spans.
    """
    if isinstance(b, dict):
        bv = b
        if any(not 0 <= k < A.nrows for k in bv):
            raise InputError("right-hand side does not fit %d rows" % A.nrows)
    else:
        if len(b) != A.nrows:
            raise InputError("dimension mismatch: %d rows, rhs of length %d" % (A.nrows, len(b)))
        bv = sparse(b)
    cols = A.columns()
    if order is None:
        order = range(A.ncols)
    elif sorted(order) != list(range(A.ncols)):
        raise InputError("order must be a permutation of the columns")
    ech = RowEchelon(A.nrows)
    kernel = []
    for j in order:
        ok, comb = ech.add(cols[j], tag=j)
        if not ok:
            k = vscale(comb, -1)
            k[j] = mpq(1)
            kernel.append(k)
    rem, comb = ech.reduce(bv)
    x = None if rem else comb
    return x, kernel


def kernel_basis(A: Matrix) -> Subspace:
    _, ker = solve(A, {})
    return Subspace(A.ncols, ker, check=False)


def image_basis(A: Matrix) -> Subspace:
    ech = RowEchelon(A.nrows)
    for col in A.columns():
        ech.add(col)
    return Subspace(A.nrows, ech.basis(), check=False)


def rank(A: Matrix) -> int:
    return A.rank()


def quotient_basis(sub: Subspace, ambient_dim: int | None = None,
                   order: Sequence[int] | None = None) -> Subspace:
    """Coordinate vectors whose classes form a basis of Q^n / sub."""
    n = sub.ambient_dim if ambient_dim is None else ambient_dim
    if n != sub.ambient_dim:
        raise InputError("subspace lives in dimension %d, not %d" % (sub.ambient_dim, n))
    ech = RowEchelon(n)
    for v in sub.basis:
        if not ech.add(v)[0]:
            raise InputError("subspace basis is not linearly independent")
    out = []
    for i in (range(n) if order is None else order):
        e = {i: mpq(1)}
        if ech.add(e)[0]:
            out.append(e)
    return Subspace(n, out, check=False)


def complement_in(sub: Subspace, big: Subspace, order: Sequence[int] | None = None) -> list[dict]:
    """Vectors of ``big`` whose classes form a basis of big / sub (sub inside big)."""
    ech = RowEchelon(sub.ambient_dim)
    for v in sub.basis:
        ech.add(v)
    idx = range(big.dim) if order is None else order
    out = []
    for i in idx:
        v = big.basis[i]
        if ech.add(v)[0]:
            out.append(dict(v))
    return out
