from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from cdga_blowup.errors import InputError
from cdga_blowup.linalg import (Matrix, Q, RowEchelon, Subspace, dense, fmt, image_basis, kernel_basis,
                                quotient_basis, solve)

from oracle import naive_rank


def test_scalars_are_exact_and_reduced():
    x = Q("6/4")
    assert (x.numerator, x.denominator) == (3, 2)
    assert Q(Fraction(-2, -6)) == mpq(1, 3)
    assert Q(1) / 3 * 3 == 1
    assert fmt(Q("-10/4")) == "-5/2"
    with pytest.raises(InputError):
        Q(0.5)


def test_solve_identity():
    x, ker = solve(Matrix.identity(3), [1, 2, 3])
    assert dense(x, 3) == [1, 2, 3] and ker == []


def test_solve_zero_map():
    x, ker = solve(Matrix.zero(2, 2), [0, 0])
    assert dense(x, 2) == [0, 0] and len(ker) == 2


def test_solve_rank_one():
    A = Matrix.from_dense([[1, 1], [2, 2]])
    x, ker = solve(A, [1, 2])
    assert dense(x, 2) == [1, 0]
    assert len(ker) == 1 and dense(ker[0], 2) in ([1, -1], [-1, 1])
    assert A.apply(ker[0]) == {}


def test_solve_inconsistent_and_mismatch():
    A = Matrix.from_dense([[1, 1], [2, 2]])
    assert solve(A, [1, 0])[0] is None
    with pytest.raises(InputError):
        solve(A, [1, 2, 3])


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(4)).dim == 0
    assert kernel_basis(Matrix.zero(3, 5)).dim == 5
    A = Matrix.from_dense([[1, 2, 3]])
    K = kernel_basis(A)
    assert K.dim == 2 and all(A.apply(v) == {} for v in K.basis)


def test_quotient_basis_examples():
    assert quotient_basis(Subspace(3, []), 3).dim == 3
    full = Subspace(2, [[1, 0], [0, 1]])
    assert quotient_basis(full, 2).dim == 0
    sub = Subspace(2, [[1, 1]])
    qb = quotient_basis(sub, 2)
    assert qb.dim == 1
    assert Matrix.from_dense([dense(sub.basis[0], 2), dense(qb.basis[0], 2)]).rank() == 2


def test_dependent_subspace_rejected():
    with pytest.raises(InputError):
        Subspace(2, [[1, 2], [2, 4]])


def test_subspace_coordinates():
    S = Subspace(3, [[1, 0, 1], [0, 1, 1]])
    assert S.coordinates([2, 3, 5]) == [2, 3]
    assert S.coordinates([0, 0, 1]) is None


def test_row_echelon_provenance():
    ech = RowEchelon(2)
    assert ech.add({0: 1, 1: 1}, tag="a")[0]
    ok, comb = ech.add({0: 2, 1: 2}, tag="b")
    assert not ok and comb == {"a": 2}


matrices = st.integers(1, 7).flatmap(lambda r: st.integers(1, 7).flatmap(
    lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=60, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_solve_properties(rows, rnd):
    A = Matrix.from_dense(rows)
    b = [rnd.randint(-3, 3) for _ in rows]
    order = list(range(A.ncols))
    rnd.shuffle(order)
    x, ker = solve(A, b, order)
    if x is not None:
        assert dense(A.apply(x), A.nrows) == b
    for k in ker:
        assert A.apply(k) == {}
    assert A.rank() + len(ker) == A.ncols
    assert A.rank() == naive_rank(rows)
    assert image_basis(A).dim == A.rank()


def test_rank_nullity_50x50():
    import random
    rnd = random.Random(7)
    rows = [[rnd.randint(-2, 2) if rnd.random() < 0.3 else 0 for _ in range(50)] for _ in range(50)]
    rows[7] = [a + b for a, b in zip(rows[3], rows[5])]
    A = Matrix.from_dense(rows)
    assert A.rank() == A.rank() == naive_rank(rows)
    assert A.rank() + kernel_basis(A).dim == 50
