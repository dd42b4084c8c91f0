import pytest

from cdga_blowup.cohomology import cohomology
from cdga_blowup.corpus import cp, kodaira_thurston
from cdga_blowup.errors import InputError, PreconditionError, ValidationError
from cdga_blowup.modules import (DgModule, Morphism, algebra_map, hom_complex, homotopy_between, mapping_cone,
                                 semi_trivial_cone_cdga, suspension)


@pytest.fixture(scope="module")
def kt_module():
    return DgModule.regular(kodaira_thurston())


@pytest.mark.parametrize("k", range(-8, 9))
def test_suspension_shifts_and_signs(kt_module, k):
    M = kt_module
    S = suspension(M, k)
    assert S.validate().ok
    assert (S.lo, S.hi) == (M.lo - k, M.hi - k)
    for j in S.degrees():
        assert S.dim(j) == M.dim(j + k)
        for i in range(S.dim(j)):
            assert S.diff_image(j, i) == {t: (-1) ** k * c for t, c in M.diff_image(j + k, i).items()}
    for (rd, ri, md, mi), v in M.action_items():
        assert S.basis_act(rd, ri, md - k, mi) == {t: (-1) ** (rd * k) * c for t, c in v.items()}


def test_double_suspension(kt_module):
    S11 = suspension(suspension(kt_module, 1), 1)
    S2 = suspension(kt_module, 2)
    for j in S2.degrees():
        assert S11.dim(j) == S2.dim(j)
        for i in range(S2.dim(j)):
            assert S11.diff_image(j, i) == S2.diff_image(j, i)
    assert dict(S11.action_items()) == dict(S2.action_items())


def test_cone_of_identity_is_acyclic(kt_module):
    C = mapping_cone(Morphism.identity(kt_module))
    assert C.validate().ok
    assert all(b == 0 for b in cohomology(C, (C.lo, C.hi)).betti)


def test_cone_of_zero_map_is_a_sum(kt_module):
    C = mapping_cone(Morphism.zero(kt_module, kt_module))
    H = cohomology(C, (C.lo, C.hi))
    base = cohomology(kt_module, (0, 4)).betti
    assert [H.dim(j) for j in range(-1, 5)] == [base[0]] + [base[j] + base[j + 1] for j in range(4)] + [base[4]]


def test_semi_trivial_cone_positive():
    R = cp(3)
    phi = algebra_map(R, cp(1), {"a": "a"})
    M = suspension(DgModule.restriction(phi), -4)  # degrees 4..6, inside [4, 8)
    A = semi_trivial_cone_cdga(Morphism.zero(M, DgModule.regular(R)))
    assert cohomology(A, (0, A.hi)).betti == [1, 0, 1, 1, 1, 1, 1]
    s = A.basis_element(3, 1)
    assert (s * s).is_zero() and (A.element("a") * s).degree == 5


def test_semi_trivial_cone_concentrated_module():
    R = cp(3)
    phi = algebra_map(R, cp(3), {"a": "a"})
    Q = DgModule.restriction(phi)
    top = suspension(Q, -4)
    # s^{-4} Q lives in degrees 4..10, not in [p, 2p)
    with pytest.raises(PreconditionError):
        semi_trivial_cone_cdga(Morphism.zero(top, DgModule.regular(R)))
    narrow = suspension(Q, -6)  # degrees 6..12
    assert narrow.lo == 6
    with pytest.raises(PreconditionError):
        semi_trivial_cone_cdga(Morphism.zero(narrow, DgModule.regular(R)))


def test_semi_trivial_cone_rejects_non_regular_target(kt_module):
    S = suspension(kt_module, -2)
    with pytest.raises(InputError):
        semi_trivial_cone_cdga(Morphism.zero(S, S))


def test_semi_trivial_cone_identity_starts_too_low():
    M = DgModule.regular(kodaira_thurston())
    with pytest.raises(PreconditionError):
        semi_trivial_cone_cdga(Morphism.identity(M))


def test_hom_complex_squares_to_zero(kt_module):
    H = hom_complex(kt_module, kt_module, (-2, 2))
    for i in range(H.lo, H.hi - 1):
        for t in range(H.dim(i)):
            dd = {}
            for k, c in H.diff_image(i, t).items():
                for k2, c2 in H.diff_image(i + 1, k).items():
                    dd[k2] = dd.get(k2, 0) + c * c2
            assert not any(dd.values())
    # Hom_R(R, R) is R itself
    assert [H.dim(i) for i in range(-2, 3)] == [kt_module.dim(j) if 0 <= j <= 4 else 0 for j in range(-2, 3)]


def test_homotopy_reflexive_and_symmetric():
    R = kodaira_thurston()
    M = DgModule.regular(R)
    f = Morphism.identity(M)
    w = homotopy_between(f, f)
    assert w is not None and w.check()
    Z = Morphism.zero(M, M)
    assert homotopy_between(f, Z) is None
    assert homotopy_between(Z, f) is None
    g = f.scaled(2)
    assert homotopy_between(f, g) is None


def test_algebra_map_checks():
    K = kodaira_thurston()
    with pytest.raises(ValidationError):
        algebra_map(K, K, {"u": "u", "y": "y", "t": "t"})  # loses dv = u*y
    with pytest.raises(InputError):
        algebra_map(K, K, {"u": "u*y"})
    A = cp(2)
    phi = algebra_map(A, A, {"a": "2*a"})
    assert phi.apply(A.element("a^2")) == 4 * A.element("a^2")
