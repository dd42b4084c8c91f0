"""Random small inputs for property checks."""
from __future__ import annotations

import random

from gmpy2 import mpq

from .algebra import DegreewiseAlgebra, Element, Presentation
from .blowup import ChernData


def _random_cocycle(A: DegreewiseAlgebra, d: int, rng: random.Random, spread: int = 3) -> Element:
    if d > A.hi or A.dim(d) == 0:
        return A.zero(d)
    Z = A.cocycles(d).basis if d < A.hi else [{i: mpq(1)} for i in range(A.dim(d))]
    out = A.zero(d)
    for v in Z:
        c = rng.randint(-spread, spread)
        if c:
            out = out + Element(A, d, {k: c * x for k, x in v.items()})
    return out


def random_presentation(rng: random.Random, max_gens: int = 4, max_degree: int = 3, top: int = 7,
                        finite: bool = False) -> Presentation:
    """A random presentation that always defines a CDGA.

    Each differential is a random combination of products of two earlier
    closed generators, so ``d^2 = 0`` holds by construction.  Even closed
    generators may get a power relation; ``finite`` forces one on all of them.
    """
    ngens = rng.randint(1, max_gens)
    gens, diff, closed, rels = [], {}, [], []
    for i in range(ngens):
        name = "g%d" % i
        deg = rng.randint(1, max_degree)
        terms = []
        for a in closed:
            for b in closed:
                if a <= b and dict(gens)[a] + dict(gens)[b] == deg + 1:
                    if a == b and dict(gens)[a] % 2:
                        continue
                    c = rng.randint(-2, 2)
                    if c:
                        terms.append("%d*%s*%s" % (c, a, b))
        if terms and rng.random() < 0.7:
            diff[name] = " + ".join(terms)
        else:
            closed.append(name)
        gens.append((name, deg))
    for name, deg in gens:
        if deg % 2 == 0 and name in closed and (finite or rng.random() < 0.5):
            rels.append("%s^%d" % (name, rng.randint(1, 3)))
    if finite:
        # an even generator with a nonzero differential would make the algebra infinite
        for name, deg in gens:
            if deg % 2 == 0 and name not in closed:
                diff.pop(name, None)
                rels.append("%s^%d" % (name, rng.randint(1, 3)))
        cap = 0
        for name, deg in gens:
            if deg % 2:
                cap += deg
            else:
                p = min(int(r.split("^")[1]) for r in rels if r.split("^")[0] == name)
                cap += deg * (p - 1)
        top = cap
    return Presentation(gens, diff, rels, top, name="random")


def random_chern(Q: DegreewiseAlgebra, k: int, rng: random.Random) -> ChernData:
    """``gamma_0 = 1`` and random cocycles ``gamma_i`` in degree ``2i``."""
    gamma = [Q.unit_element()]
    for i in range(1, k):
        gamma.append(_random_cocycle(Q, 2 * i, rng))
    return ChernData(k, gamma)
