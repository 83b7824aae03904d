import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import nat, nat_matrices, square_matrices, to_np
from shifteq.errors import IncompatibleIndexSets, NotSquare
from shifteq.matrices import (OMEGA, CardMatrix, IndexSet, NatMatrix, card_mul, card_plus, card_times, identity,
                              is_essential, mat_mul, mat_pow, product, rank_rational, same_entries, trace, zeros)

CARD = st.one_of(st.integers(0, 3), st.just(OMEGA))


def test_cardinal_arithmetic_table():
    assert card_times(0, OMEGA) == 0
    assert card_times(OMEGA, 0) == 0
    assert card_times(2, OMEGA) is OMEGA
    assert card_times(OMEGA, OMEGA) is OMEGA
    assert card_plus(OMEGA, 0) is OMEGA
    assert card_plus(3, 4) == 7
    assert repr(OMEGA) == "ω"


@given(CARD, CARD, CARD)
def test_cardinal_arithmetic_is_a_semiring(x, y, z):
    assert card_plus(x, y) == card_plus(y, x)
    assert card_times(x, y) == card_times(y, x)
    assert card_times(x, card_plus(y, z)) == card_plus(card_times(x, y), card_times(x, z))
    assert card_times(card_times(x, y), z) == card_times(x, card_times(y, z))


@given(st.data())
def test_mat_mul_matches_numpy(data):
    A = data.draw(nat_matrices(row_name="V", col_name="W"))
    B = data.draw(nat_matrices(rows=A.cols.size, row_name="W", col_name="U"))
    C = mat_mul(A, B)
    assert (C.rows, C.cols) == (A.rows, B.cols)
    np.testing.assert_array_equal(to_np(C), to_np(A) @ to_np(B))


@given(square_matrices(), st.integers(1, 5))
def test_mat_pow_matches_numpy(A, m):
    np.testing.assert_array_equal(to_np(mat_pow(A, m)), np.linalg.matrix_power(to_np(A), m))


@given(nat_matrices(max_entry=4))
def test_rank_matches_sympy(A):
    assert rank_rational(A) == sympy.Matrix(A.data).rank()


@given(square_matrices())
def test_trace_matches_numpy(A):
    assert trace(A) == int(np.trace(to_np(A)))


def test_products_check_index_sets():
    A = nat([[1, 2]], "V", "W")
    B = nat([[1], [1]], "U", "V")
    with pytest.raises(IncompatibleIndexSets):
        mat_mul(A, B)
    with pytest.raises(NotSquare):
        mat_pow(A, 2)
    with pytest.raises(ValueError):
        mat_pow(nat([[1]]), 0)


def test_card_mul_uses_cardinal_arithmetic():
    V, W = IndexSet("V", 2), IndexSet("W", 2)
    C = CardMatrix(V, W, ((1, OMEGA), (0, 0)))
    D = CardMatrix(W, V, ((2, 0), (0, 0)))
    # ω times a zero column contributes nothing
    assert card_mul(C, D).data == ((2, 0), (0, 0))
    E = CardMatrix(W, V, ((0, 0), (1, 0)))
    assert card_mul(C, E).data == ((OMEGA, 0), (0, 0))
    assert product([C, E]).data == ((OMEGA, 0), (0, 0))


def test_card_matrix_roundtrip_to_nat():
    M = nat([[1, 0], [2, 3]])
    C = CardMatrix.from_matrix(M)
    assert C.is_finite() and C.to_nat() == M
    assert same_entries(C, M)


def test_identity_zeros_and_essential():
    V = IndexSet("V", 3)
    assert identity(V).data == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert not is_essential(zeros(V, V))
    assert is_essential(identity(V))
    assert not is_essential(nat([[1, 1], [0, 0]]))
    assert not is_essential(nat([[1, 0], [1, 0]]))


def test_submatrix_and_restrict_names():
    M = nat([[1, 2, 3], [4, 5, 6], [7, 8, 9]], "U1")
    keep = (0, 2)
    U = M.rows.restrict(keep)
    assert U.name == "U1[0,2]" and U.size == 2
    assert M.submatrix(keep, keep, U, U).data == ((1, 3), (7, 9))


def test_index_sets_must_match_data():
    with pytest.raises(Exception):
        NatMatrix(IndexSet("V", 2), IndexSet("V", 2), ((1, 2),))
    with pytest.raises(Exception):
        NatMatrix(IndexSet("V", 1), IndexSet("V", 1), ((-1,),))
