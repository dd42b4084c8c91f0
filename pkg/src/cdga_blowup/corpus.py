"""Built-in models: projective spaces, the Kodaira-Thurston manifold and the worked embeddings."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from gmpy2 import mpq

from .algebra import DegreewiseAlgebra, cdga_from_presentation, truncated_polynomial
from .blowup import (ChernData, EmbeddingModel, SymplecticEmbeddingData, chern_normal, shriek_cpn)
from .errors import InputError
from .modules import algebra_map


def cp(n: int, name: str = "a") -> DegreewiseAlgebra:
    """``Lambda(a)/(a^{n+1})``, the formal model of complex projective n-space."""
    if n < 0:
        raise InputError("CP(n) needs n >= 0")
    if n == 0:
        return cdga_from_presentation([], {}, [], 0, name="CP(0)")
    A = truncated_polynomial(name, 2, n + 1, 2 * n)
    A.name = "CP(%d)" % n
    return A


def kodaira_thurston() -> DegreewiseAlgebra:
    """Minimal model of the Kodaira-Thurston nilmanifold: ``dv = uy``."""
    return cdga_from_presentation([("u", 1), ("y", 1), ("v", 1), ("t", 1)], {"v": "u*y"}, [], 4,
                                  name="KT")


def cp1() -> DegreewiseAlgebra:
    A = truncated_polynomial("a'", 2, 2, 2)
    A.name = "CP(1)"
    return A


@dataclass
class EmbeddingExample:
    """An embedding together with its symplectic and Chern data."""
    name: str
    embedding: EmbeddingModel
    symplectic: SymplecticEmbeddingData
    chern: ChernData

    def shriek(self, seed: int | None = None):
        return shriek_cpn(self.embedding, self.symplectic, seed)


def pulled_chern_cp(n: int, Q: DegreewiseAlgebra, h) -> list:
    """``f^* c(CP(n)) = (1 + h)^{n+1}`` where ``h`` is the pullback of the hyperplane class."""
    return [comb(n + 1, j) * Q.power(h, j) for j in range(n + 2) if 2 * j <= Q.hi]


def symplectic_in_cp(name: str, n: int, Q: DegreewiseAlgebra, omega: str, orientation: str,
                     c_V=("1",), l_M=None, constants=None) -> EmbeddingExample:
    """Embedding of a symplectic ``Q`` in ``CP(n)`` with ``a -> omega``."""
    R = cp(n)
    phi = algebra_map(R, Q, {"a": omega}, constants=constants)
    u_V = Q.element(orientation, constants)
    m = u_V.degree
    e = EmbeddingModel(R, Q, phi, 2 * n, m, R.power(R.element("a"), n), u_V)
    w = phi.apply(R.element("a"))
    s = SymplecticEmbeddingData(Q, w, u_V, l_M)
    c_V = [Q.element(t, constants) if not hasattr(t, "coeffs") else t for t in c_V]
    chern = chern_normal(c_V, pulled_chern_cp(n, Q, w), m, e.k, Q)
    return EmbeddingExample(name, e, s, chern)


def mcduff(n: int = 6) -> EmbeddingExample:
    """Kodaira-Thurston in ``CP(n)`` via ``a -> omega = uv + yt``; ``l_M = 2``."""
    return symplectic_in_cp("mcduff", n, kodaira_thurston(), "u*v + y*t", "u*v*y*t", l_M=2)


def cp5_family(l: int) -> EmbeddingExample:
    """``CP(1)`` in ``CP(5)`` with ``a -> l a'``."""
    if l < 1:
        raise InputError("the family is indexed by l >= 1")
    return symplectic_in_cp("cp5-l%d" % l, 5, cp1(), "%d*a'" % l, "a'", c_V=("1", "2*a'"), l_M=mpq(l))
