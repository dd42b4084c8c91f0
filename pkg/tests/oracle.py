"""Independent reference computations.

Nothing here imports the package: ranks use plain Fraction elimination and
exterior algebras are enumerated from scratch with their own sign convention.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations



def rank(rows) -> int:
    """Exact rank by textbook Gaussian elimination over ``fractions.Fraction``."""
    return naive_rank(rows)


def naive_rank(rows) -> int:
    """Textbook Gaussian elimination over Fraction, for cross-checking sympy."""
    m = [[Fraction(str(x)) for x in r] for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def _wedge(S: tuple, T: tuple):
    """Sign and sorted index set of e_S ^ e_T for sorted index tuples, or (0, None)."""
    if set(S) & set(T):
        return 0, None
    seq = list(S) + list(T)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1) ** inv, tuple(sorted(seq))


def exterior_betti(ngens: int, dgen: dict) -> list[int]:
    """Betti numbers of ``Lambda(e_0..e_{n-1})`` with degree 1 generators.

    ``dgen[i]`` is ``{(j, k): c}`` meaning ``d e_i = sum c e_j e_k``.
    """
    basis = {d: list(combinations(range(ngens), d)) for d in range(ngens + 1)}

    def d_of(S):
        out = {}
        for pos, g in enumerate(S):
            rest = S[:pos] + S[pos + 1:]
            sgn = (-1) ** pos
            for (j, k), c in dgen.get(g, {}).items():
                s1, T = _wedge((j, k), rest) if j < k else (0, None)
                if s1:
                    out[T] = out.get(T, 0) + sgn * s1 * c
        return out

    ranks = {}
    for d in range(ngens):
        rows = []
        for S in basis[d]:
            img = d_of(S)
            rows.append([img.get(T, 0) for T in basis[d + 1]])
        ranks[d] = rank(rows) if rows and basis[d + 1] else 0
    return [len(basis[d]) - ranks.get(d, 0) - ranks.get(d - 1, 0) for d in range(ngens + 1)]


def complex_betti(dims: list[int], diff_rows: dict) -> list[int]:
    """Betti numbers from dense differential matrices ``diff_rows[d]`` (rows = basis of degree d)."""
    rk = {d: rank(rows) if rows and rows[0] else 0 for d, rows in diff_rows.items()}
    return [dims[d] - rk.get(d, 0) - rk.get(d - 1, 0) for d in range(len(dims))]
