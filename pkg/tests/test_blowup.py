import pytest
from gmpy2 import mpq

from cdga_blowup.algebra import cdga_from_presentation, rational_point, validate
from cdga_blowup.blowup import (ChernData, EmbeddingModel, SymplecticEmbeddingData, blowup_model, chern_normal,
                                complement_model, leray_hirsch_dims, omega_complement, projectivization_model,
                                shriek_cpn, shriek_solve)
from cdga_blowup.cohomology import cohomology, euler_characteristic, is_quasi_iso, poincare_check
from cdga_blowup.corpus import cp, cp5_family, kodaira_thurston, mcduff, symplectic_in_cp
from cdga_blowup.errors import HypothesisError, InputError, PreconditionError
from cdga_blowup.modules import algebra_map, homotopy_between

from oracle import complex_betti, exterior_betti

KT_BETTI = exterior_betti(4, {2: {(0, 1): 1}})


def _additive(n_cp, q_betti, k, top):
    """b_d(CP(n)) + sum_{j=1}^{k-1} b_{d-2j}(V), from raw Betti lists."""
    cp_b = [1 if d % 2 == 0 and d <= 2 * n_cp else 0 for d in range(top + 1)]
    qb = lambda d: q_betti[d] if 0 <= d < len(q_betti) else 0
    return [cp_b[d] + sum(qb(d - 2 * j) for j in range(1, k)) for d in range(top + 1)]


# -- hypotheses

def test_stable_range_violation_message():
    ex = symplectic_in_cp("kt-cp4", 4, kodaira_thurston(), "u*v + y*t", "u*v*y*t")
    with pytest.raises(HypothesisError, match="stable range violated: need dim W ≥ 2 dim V \\+ 3"):
        blowup_model(ex.embedding, shriek_solve(ex.embedding), ex.chern)


def test_odd_codimension_rejected():
    R = cp(3)
    Q = cdga_from_presentation([("s", 1)], {}, [], 1)
    e = EmbeddingModel(R, Q, algebra_map(R, Q, {}), 6, 1, R.element("a^3"), Q.element("s"))
    with pytest.raises(HypothesisError, match="odd codimension"):
        e.check_blowup()


def test_truncated_models_rejected():
    R = cdga_from_presentation([("a", 2)], {}, [], 6)
    Q = rational_point()
    e = EmbeddingModel(R, Q, algebra_map(R, Q, {}), 6, 0, R.element("a^3"), Q.unit_element())
    with pytest.raises(PreconditionError):
        shriek_solve(e)


def test_h1_injectivity_required():
    R = kodaira_thurston()
    Q = rational_point()
    e = EmbeddingModel(R, Q, algebra_map(R, Q, {}), 4, 0, R.element("u*y*v*t"), Q.unit_element())
    with pytest.raises(HypothesisError, match="H\\^1"):
        e.check_blowup()


# -- shriek maps

def test_shriek_normalization(mcduff_example):
    e = mcduff_example.embedding
    eps = e.epsilon()
    for f in (shriek_solve(e), shriek_cpn(e, mcduff_example.symplectic), shriek_solve(e, seed=11)):
        img = {}
        for q, c in e.u_V.coeffs.items():
            for t, v in f.image(e.n, q).items():
                img[t] = img.get(t, 0) + c * v
        assert sum(eps.get(t, 0) * v for t, v in img.items()) == 1


def test_shriek_cpn_mcduff_values(mcduff_example):
    e = mcduff_example.embedding
    f = mcduff_example.shriek()
    Q = e.Q
    assert f.image(8, 0) == {0: 2}
    for name in ("u*v", "y*t"):
        assert f.image(10, Q.find(name)[1]) == {0: 1}
    assert f.image(12, 0) == {0: -1}  # top basis element is u*y*v*t = -u*v*y*t
    for name in Q.basis[2]:
        if name not in ("u*v", "y*t"):
            assert f.image(10, Q.find(name)[1]) == {}
    for d in (9, 11):
        assert all(not row for row in f.images[d])


@pytest.mark.parametrize("l", [1, 2, 3])
def test_shriek_cp5_family(cp5_models, l):
    ex, _ = cp5_models[l]
    f = ex.shriek()
    assert f.image(8, 0) == {0: l}
    assert f.image(10, 0) == {0: 1}
    assert ex.symplectic.l_M == l


def test_l_m_scaling():
    one = cp5_family(1).shriek().image(8, 0)[0]
    two = cp5_family(2).shriek().image(8, 0)[0]
    assert two == 2 * one


def test_shriek_maps_are_homotopic(mcduff_example):
    e = mcduff_example.embedding
    f_cpn = mcduff_example.shriek()
    for f in (shriek_solve(e), shriek_solve(e, seed=5)):
        w = homotopy_between(f_cpn, f)
        assert w is not None and w.check()


def test_shriek_point_submanifold():
    R = cp(3)
    Q = rational_point()
    e = EmbeddingModel(R, Q, algebra_map(R, Q, {}), 6, 0, R.element("a^3"), Q.unit_element())
    f = shriek_solve(e)
    assert f.image(6, 0) == {0: 1}


# -- omega complement

def test_omega_complement_kodaira_thurston():
    Q = kodaira_thurston()
    s = SymplecticEmbeddingData(Q, Q.element("u*v + y*t"), Q.element("u*v*y*t"))
    assert s.l_M == 2
    oc = omega_complement(s)
    assert oc.dims() == [0, 4, 5, 4, 0]
    for seed in (1, 2, 3):
        other = omega_complement(s, seed)
        for d in Q.degrees():
            assert other.pieces[d].dim == oc.pieces[d].dim
            assert all(oc.pieces[d].contains(v) for v in other.pieces[d].basis)


def test_omega_complement_of_truncated_polynomial_is_zero():
    Q = cp(3)
    s = SymplecticEmbeddingData(Q, Q.element("a"), Q.element("a^3"))
    assert sum(omega_complement(s).dims()) == 0


def test_given_l_m_is_checked():
    Q = kodaira_thurston()
    with pytest.raises(InputError):
        SymplecticEmbeddingData(Q, Q.element("u*v + y*t"), Q.element("u*v*y*t"), l_M=3)


# -- Chern classes

def test_chern_normal_kodaira_thurston():
    for n in (6, 7):
        ex = symplectic_in_cp("kt", n, kodaira_thurston(), "u*v + y*t", "u*v*y*t")
        Q, w = ex.embedding.Q, ex.symplectic.omega
        g = ex.chern.gamma
        assert g[1] == (n + 1) * w
        assert g[2] == mpq(n * (n + 1), 2) * Q.power(w, 2)
        assert all(x.is_zero() for x in g[3:])


@pytest.mark.parametrize("l", [1, 2, 5])
def test_chern_normal_cp1(l):
    ex = cp5_family(l)
    Q = ex.embedding.Q
    assert ex.chern.gamma[1] == (6 * l - 2) * Q.element("a'")


def test_chern_normal_trivial_bundle():
    Q = kodaira_thurston()
    c = chern_normal(["1", "3*u*v"], ["1", "3*u*v"], 4, 3, Q)
    assert all(x.is_zero() for x in c.gamma[1:])


def test_chern_data_validation():
    Q = kodaira_thurston()
    with pytest.raises(InputError):
        ChernData(2, [Q.element("u*v"), Q.element("u*v")])
    with pytest.raises(InputError):
        ChernData(2, [Q.unit_element(), Q.element("u*y*t")])


# -- complement model

def test_cp5_complement_betti():
    ex = cp5_family(1)
    cm = complement_model(ex.embedding, ex.shriek())
    A = cm.source
    H = cohomology(A, (0, 9))
    # independent count through dense matrices
    dims = [A.dim(d) for d in range(11)]
    rows = {d: [[int(x) for x in r] for r in A.diff_matrix(d).to_dense()] for d in range(10)}
    assert complex_betti(dims, rows)[:10] == H.betti
    # CP(5) minus a line retracts onto the complementary CP(3)
    assert H.betti == [1, 0, 1, 0, 1, 0, 1, 0, 0, 0]
    # cone exactness: chi(source) = chi(R) - chi(Q) for even codimension
    assert euler_characteristic(H.betti) == 6 - 2
    assert validate(cm.target).ok


def test_complement_map_restricts_to_phi():
    ex = cp5_family(1)
    cm = complement_model(ex.embedding, ex.shriek())
    R = ex.embedding.R
    for d in R.degrees():
        for i in range(R.dim(d)):
            assert cm.map.image(d, i) == ex.embedding.phi.image(d, i)


# -- projectivization

@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_projectivization_of_point(k):
    Q = rational_point(2 * k)
    chern = ChernData(k, [Q.unit_element()] + [Q.zero(2 * i) for i in range(1, k)])
    pm = projectivization_model(Q, chern)
    H = cohomology(pm.total, (0, 2 * k))
    assert H.betti == [1 if d % 2 == 0 and d <= 2 * k - 2 else 0 for d in range(2 * k + 1)]


def test_projectivization_leray_hirsch(mcduff_example):
    ex = mcduff_example
    Q = ex.embedding.Q
    pm = projectivization_model(Q, ex.chern)
    top = 4 + 2 * ex.chern.k - 1
    H = cohomology(pm.total, (0, top))
    assert H.betti == leray_hirsch_dims(Q, ex.chern.k, top)
    assert H.betti == [sum(KT_BETTI[d - 2 * j] for j in range(4) if 0 <= d - 2 * j <= 4) for d in range(top + 1)]
    assert not is_quasi_iso(pm.map, (0, 4))


def test_projectivization_dimension_guard():
    Q = kodaira_thurston()
    with pytest.raises(PreconditionError):
        projectivization_model(Q, ChernData(2, [Q.unit_element(), Q.zero(2)]))


# -- the blow-up itself

def test_mcduff_blowup(mcduff_model):
    bm = mcduff_model
    assert validate(bm.algebra).ok
    Q = bm.embedding.Q
    u, y, v = (Q.element(g) for g in "uyv")
    assert bm.lift(v, 2).d() == bm.lift(u, 1) * bm.lift(y, 1)
    R = bm.ring()
    assert R.betti[:13] == _additive(6, KT_BETTI, 4, 12)
    assert poincare_check(R, 12).ok


def test_blowup_iota(mcduff_model):
    bm = mcduff_model
    assert bm.iota.is_injective() and bm.iota.check().ok
    HB = cohomology(bm.algebra, (0, 1))
    HR = cohomology(bm.embedding.R, (0, 1))
    assert HB.betti == HR.betti


@pytest.mark.parametrize("l", [1, 2, 3])
def test_cp5_blowup_betti(cp5_models, l):
    _, bm = cp5_models[l]
    R = bm.ring()
    assert R.betti[:11] == _additive(5, [1, 0, 1], 4, 10) == [1, 0, 2, 0, 3, 0, 3, 0, 2, 0, 1]
    assert poincare_check(R, 10).ok


def test_blowup_rejects_foreign_shriek(mcduff_example, cp5_models):
    ex5, _ = cp5_models[1]
    with pytest.raises(InputError):
        blowup_model(mcduff_example.embedding, ex5.shriek(), mcduff_example.chern)


def test_blowup_rejects_bare_q_words(mcduff_model):
    with pytest.raises(InputError):
        mcduff_model.algebra.element("u*y")
    assert not mcduff_model.algebra.element("u*x").is_zero()


def test_blowup_of_kt_in_cp7():
    ex = mcduff(7)
    bm = blowup_model(ex.embedding, ex.shriek(), ex.chern)
    R = bm.ring()
    assert R.betti[:15] == _additive(7, KT_BETTI, 5, 14)
    assert poincare_check(R, 14).ok
