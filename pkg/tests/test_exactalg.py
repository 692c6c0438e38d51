from fractions import Fraction

import numpy as np
import pytest

from transverse.exactalg import (CoefficientRing, SparseMatrix, SparseVector, hermite_normal_form, in_image, rank,
                                 smith_invariants, smith_normal_form, solve)

GF2 = CoefficientRing.GF2
Q = CoefficientRing.RATIONAL
Z = CoefficientRing.INTEGER


def matrix(rows, ring: CoefficientRing) -> SparseMatrix:
    return SparseMatrix.from_dense(rows, ring)


def vector(values, ring: CoefficientRing) -> SparseVector:
    return SparseVector.from_dense(values, ring)


def test_rank_examples() -> None:
    assert rank(matrix(np.eye(3, dtype=int), GF2), GF2) == 3
    assert rank(matrix([[2, 4], [6, 8]], Q), Q) == 2
    assert rank(matrix([[0, 0], [0, 0]], Q), Q) == 0


def test_rank_depends_on_characteristic() -> None:
    M = [[1, 1], [1, -1]]
    assert rank(matrix(M, Q), Q) == 2
    assert rank(matrix(M, GF2), GF2) == 1
    assert rank(matrix([[2, 4], [6, 8]], Z), Z) == 2


def test_solve_gf2_back_substitution() -> None:
    x = solve(matrix([[1, 1], [0, 1]], GF2), vector([1, 0], GF2), GF2)
    assert x is not None
    assert x.entries == {0: 1}


def test_solve_respects_integrality() -> None:
    assert solve(matrix([[2]], Z), vector([1], Z), Z) is None
    x = solve(matrix([[2]], Q), vector([1], Q), Q)
    assert x.entries == {0: Fraction(1, 2)}


def test_solve_zero_system() -> None:
    x = solve(SparseMatrix(2, 2), SparseVector(2), Z)
    assert x is not None and x.is_zero()


def test_solve_integer_needs_non_unit_block() -> None:
    M = matrix([[2, 3], [4, 5]], Z)
    x = solve(M, vector([1, 1], Z), Z)
    assert x is not None
    assert M.matvec(x, Z).entries == {0: 1, 1: 1}


def test_in_image_agrees_with_solve() -> None:
    M = matrix([[1, 0], [0, 0]], GF2)
    assert in_image(M, vector([1, 0], GF2), GF2)
    assert not in_image(M, vector([0, 1], GF2), GF2)
    assert not in_image(matrix([[2]], Z), vector([1], Z), Z)


@pytest.mark.parametrize("ring", list(CoefficientRing))
def test_solve_recovers_planted_preimages(ring: CoefficientRing, rng: np.random.Generator) -> None:
    for _ in range(25):
        rows, cols = (int(v) for v in rng.integers(1, 7, size=2))
        dense = rng.integers(-2, 3, size=(rows, cols))
        planted = rng.integers(-2, 3, size=cols)
        M = matrix(dense, ring)
        b = M.matvec(vector(planted, ring), ring)
        x = solve(M, b, ring)
        assert x is not None
        assert M.matvec(x, ring).entries == b.entries


def test_smith_normal_form_examples() -> None:
    assert smith_normal_form([[2, 4], [6, 8]]).diagonal == [2, 4]
    assert smith_normal_form([[1, 0], [0, 1]]).diagonal == [1, 1]
    assert smith_normal_form([[0]]).diagonal == [0]


def test_smith_normal_form_transforms(rng: np.random.Generator) -> None:
    for _ in range(20):
        A = rng.integers(-4, 5, size=(3, 4))
        form = smith_normal_form(A.tolist())
        U, S, V = (np.array(x, dtype=object) for x in (form.U, form.S, form.V))
        assert (U.dot(np.array(A, dtype=object)).dot(V) == S).all()
        diagonal = [d for d in form.diagonal if d != 0]
        assert all(d > 0 for d in diagonal)
        assert all(b % a == 0 for a, b in zip(diagonal, diagonal[1:]))


def test_smith_invariants_of_sparse_matrix() -> None:
    assert smith_invariants(matrix([[2, 4], [6, 8]], Z)) == [2, 4]
    assert smith_invariants(matrix([[1, 0], [0, 3]], Z)) == [1, 3]


def test_hermite_form_is_unimodular_column_transform(rng: np.random.Generator) -> None:
    for _ in range(20):
        A = rng.integers(-5, 6, size=(3, 3))
        form = hermite_normal_form(A.tolist())
        H, V = np.array(form.H, dtype=object), np.array(form.V, dtype=object)
        assert (np.array(A, dtype=object).dot(V) == H).all()
        assert round(abs(np.linalg.det(np.array(form.V, dtype=float)))) == 1
        for r, c in form.pivots:
            assert H[r, c] > 0


def test_sparse_containers_validate_entries() -> None:
    with pytest.raises(ValueError):
        SparseVector(2, {0: 0})
    with pytest.raises(ValueError):
        SparseVector(2, {2: 1})
    with pytest.raises(ValueError):
        SparseMatrix(1, 1, {(1, 0): 1})
    with pytest.raises(ValueError):
        SparseMatrix(2, 2).matvec(SparseVector(3), Q)


def test_ring_normalization() -> None:
    assert GF2.normalize(3) == 1
    assert Q.normalize(1) == Fraction(1)
    assert Z.normalize(Fraction(4, 2)) == 2
    with pytest.raises(ValueError):
        Z.normalize(Fraction(1, 2))
    assert Z.is_unit(-1) and not Z.is_unit(2)
    assert Q.is_unit(Fraction(2))


def test_dense_round_trip_keeps_sparsity() -> None:
    M = matrix([[0, 3], [0, 0]], Z)
    assert M.nnz == 1
    assert M.transpose().entries == {(1, 0): 3}
    assert M.to_dense().tolist() == [[0, 3], [0, 0]]
