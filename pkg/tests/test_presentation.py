import random

import pytest
from gmpy2 import mpq

from cdga_blowup.cohomology import CohomologyRing, cup_structure
from cdga_blowup.corpus import cp, kodaira_thurston
from cdga_blowup.errors import InputError, PreconditionError
from cdga_blowup.presentation import (blowup_presentation, compare_with_direct, cp5_blowup_presentation,
                                      cp5_relations, cp5_second_model, cp5_separating_invariant, fingerprint,
                                      presentation_from_model, presentation_inputs)


def _scramble(ring: CohomologyRing, rnd) -> CohomologyRing:
    """Same ring in a permuted and rescaled basis."""
    perm, scale = {}, {}
    for d in range(ring.hi + 1):
        p = list(range(ring.dim(d)))
        rnd.shuffle(p)
        perm[d] = p
        scale[d] = [mpq(rnd.choice([1, -1, 2, 3]), rnd.choice([1, 2, 5])) for _ in p]
    inv = {d: {old: new for new, old in enumerate(p)} for d, p in perm.items()}
    if ring.dim(0):
        scale[0] = [mpq(1)]
    mult = {}
    for d in range(1, ring.hi + 1):
        for e in range(1, ring.hi + 1 - d):
            for i in range(ring.dim(d)):
                for j in range(ring.dim(e)):
                    out = {}
                    for t, c in ring.basis_mul(d, perm[d][i], e, perm[e][j]).items():
                        nt = inv[d + e][t]
                        out[nt] = c * scale[d][i] * scale[e][j] / scale[d + e][nt]
                    if out:
                        mult[(d, i, e, j)] = out
    names = {d: ["b%d_%d" % (d, i) for i in range(ring.dim(d))] for d in range(ring.hi + 1)}
    names[0] = list(ring.names[0])
    return CohomologyRing(names, mult, ring.hi)


def test_relations():
    assert cp5_relations(1) == ["a^6", "a^2*x", "1*a^4 + 4*a*x^3 + 1*x^4"]
    assert cp5_relations(2)[2] == "4*a^4 + 10*a*x^3 + 2*x^4"
    with pytest.raises(InputError):
        cp5_relations(0)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_second_model_matches_presentation(cp5_models, l):
    _, bm = cp5_models[l]
    p = presentation_from_model(bm)
    assert fingerprint(p.ring) == fingerprint(cp5_second_model(l))
    assert p.ring.betti == [1, 0, 2, 0, 3, 0, 3, 0, 2, 0, 1]
    chk = compare_with_direct(p, bm)
    assert chk.ok and chk.canonical_map and chk.first_difference is None


def test_cp5_blowup_presentation_is_consistent():
    p = cp5_blowup_presentation(2)
    assert fingerprint(p.ring) == fingerprint(cp5_second_model(2))
    assert p.k == 4 and p.n == 10


def test_mcduff_presentation(mcduff_model):
    p = presentation_from_model(mcduff_model)
    direct = mcduff_model.ring()
    assert p.ring.betti == direct.betti[:13]
    chk = compare_with_direct(p, mcduff_model)
    assert chk.ok and chk.canonical_map, chk.messages


def test_corrupted_chern_class_detected(cp5_models):
    ex, bm = cp5_models[1]
    data = presentation_inputs(bm)
    bad = [dict(c) for c in data["chern"]]
    bad[1] = {0: bad[1][0] + 1}
    p = presentation_from_model(bm, chern=bad)
    chk = compare_with_direct(p, bm)
    assert not chk.ok
    assert chk.first_difference is not None and 0 <= chk.first_difference <= 10
    assert chk.messages


def test_canonical_check_skipped_for_foreign_models(cp5_models):
    _, bm = cp5_models[2]
    chk = compare_with_direct(cp5_blowup_presentation(2), bm)
    assert chk.ok and chk.canonical_map is None
    assert any("skipped" in m for m in chk.messages)


def test_k_one_rejected():
    HW = cup_structure(cp(2), (0, 4), formal_dimension=4)
    HV = cup_structure(cp(1), (0, 2), formal_dimension=2)
    with pytest.raises(PreconditionError):
        blowup_presentation(HW, HV, {0: [{0: 1}]}, {0: [{0: 1}]}, [{0: 1}], 1, 4)


def test_fingerprint_examples():
    f = fingerprint(cup_structure(cp(5), (0, 10)))
    assert f.betti == (1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1)
    assert all(r == 1 for (d, e), r in f.cup_ranks)
    kt = fingerprint(cup_structure(kodaira_thurston(), (0, 4)))
    assert kt.betti == (1, 3, 4, 3, 1)
    assert dict(kt.cup_ranks)[(1, 1)] == 2


@pytest.mark.parametrize("seed", range(5))
def test_fingerprint_basis_free(seed):
    rnd = random.Random(seed)
    for ring in (cup_structure(kodaira_thurston(), (0, 4)), cp5_second_model(3)):
        other = _scramble(ring, rnd)
        assert other.check() == []
        assert fingerprint(other) == fingerprint(ring)


def test_first_difference():
    a = fingerprint(cp5_second_model(1))
    b = fingerprint(cup_structure(cp(5), (0, 10)))
    assert a.first_difference(b) == 2
    assert a.first_difference(a) is None


def test_separating_invariant():
    assert cp5_separating_invariant(1) == 256
    assert cp5_separating_invariant(2) == mpq(625, 2)
    vals = [cp5_separating_invariant(l) for l in range(1, 30)]
    assert len(set(vals)) == len(vals)
    # decreasing from l = 2 on
    assert all(x > y for x, y in zip(vals[1:], vals[2:]))
    with pytest.raises(InputError):
        cp5_separating_invariant(0)
