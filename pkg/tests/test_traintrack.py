import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nuetrack.exactnum import GoldenNumber, fibonacci, to_approx
from nuetrack.traintrack import (
    Generator,
    GapSequence,
    InvalidSequence,
    SequenceTooShort,
    block_P,
    determinant,
    gamma_vector,
    gamma_vector_by_maps,
    generator_matrix,
    identity,
    is_nonnegative,
    mat_pow,
    phi_matrix,
    top_eigenvalue,
    unit_vector,
)
from mpmath import mp

A = generator_matrix(Generator.TAFFY)
M = generator_matrix(Generator.TAFFY_ROT)


def same(x, y):
    return bool((np.asarray(x) == np.asarray(y)).all())


TAFFY_ROWS = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 1, 1, 1, 1],
    [0, 0, 0, 1, 1, 2, 0, 1, 2],
]
ROTATION_ROWS = [
    [0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
]


def test_taffy_matrix():
    assert A.tolist() == TAFFY_ROWS
    for i in range(7):
        assert list(A[i]) == list(unit_vector(i + 1))


def test_taffy_rot_matrix():
    assert M.tolist() == ROTATION_ROWS
    assert list(M[4]) == [0, 0, 0, 1, 1, 0, 0, 0, 0]
    assert M[1, 8] == 1


@pytest.mark.xfail(strict=True, reason="row 7 of the rotation matrix is e_1 + e_3")
def test_taffy_rot_rows_other_than_five_are_unit():
    for i in range(9):
        if i != 4:
            assert sorted(M[i]) == [0] * 8 + [1]


def test_determinants():
    assert abs(determinant(A)) == 1
    assert determinant(M) != 0


def test_phi_matrix_one_is_M():
    assert same(phi_matrix(1), M)


@pytest.mark.parametrize("r", range(1, 21))
def test_phi_matrix_sends_e9_to_e2(r):
    assert list(phi_matrix(r).dot(unit_vector(9))) == list(unit_vector(2))


def test_phi_matrix_nonnegative():
    m = phi_matrix(5)
    assert is_nonnegative(m) and all(isinstance(x, int) for x in m.flat)


def test_A_fixes_e2():
    assert list(A.dot(unit_vector(2))) == list(unit_vector(2))


@pytest.mark.xfail(strict=True, reason="column 4 of the taffy matrix is e_4 + e_9")
def test_A_fixes_e4():
    assert list(A.dot(unit_vector(4))) == list(unit_vector(4))


def test_block_P_definition():
    assert same(block_P(0, 1), M.dot(A).dot(M))
    assert list(block_P(0, 1).dot(unit_vector(9))) == list(unit_vector(4))


def test_gamma_vectors(seq):
    assert list(gamma_vector(0, seq)) == list(unit_vector(9))
    assert list(gamma_vector(1, seq)) == list(unit_vector(2))
    assert list(gamma_vector(2, seq)) == list(unit_vector(4))


@pytest.mark.parametrize("n", range(0, 12))
def test_gamma_vector_association_orders(seq, n):
    v = gamma_vector(n, seq)
    assert list(v) == list(gamma_vector_by_maps(n, seq))
    assert all(x >= 0 for x in v) and any(x > 0 for x in v)


def test_gamma_vector_needs_long_sequence():
    short = GapSequence((1, 2, 4))
    with pytest.raises(SequenceTooShort):
        gamma_vector(5, short)


def test_gap_sequence_validation():
    assert GapSequence.default().r[:6] == (1, 2, 4, 7, 11, 16)
    with pytest.raises(InvalidSequence):
        GapSequence((1, 2, 3, 4))
    with pytest.raises(InvalidSequence):
        GapSequence((1, 3, 6))
    with pytest.raises(InvalidSequence):
        GapSequence.parse("bogus")
    assert GapSequence.parse("1,2,4,8").r == (1, 2, 4, 8)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=8))
def test_words_preserve_nonnegativity(word):
    v = unit_vector(9)
    for letter in word:
        v = (A if letter % 2 else M).dot(v)
    assert all(x >= 0 for x in v) and any(x > 0 for x in v)


@given(st.integers(0, 30), st.integers(0, 30))
def test_block_P_is_A_power_product(a, b):
    assert same(block_P(a, b), mat_pow(A, a).dot(M).dot(mat_pow(A, b)).dot(M))


def test_top_eigenvalue_identity():
    assert top_eigenvalue(identity(), 128).contains(1)


def test_top_eigenvalue_taffy_is_phi_squared():
    phi2 = GoldenNumber(0, 0) + (GoldenNumber(1, 1) / 2) ** 2
    enclosure = top_eigenvalue(A, 128)
    with mp.workprec(128):
        assert enclosure.lo <= to_approx(phi2, 128).value <= enclosure.hi


@pytest.mark.parametrize("a,b", [(1, 4), (2, 6), (3, 9)])
def test_top_eigenvalue_near_twice_fibonacci(a, b):
    lam = top_eigenvalue(block_P(a, b), 128)
    assert abs(float(lam.value) / (2 * fibonacci(2 * b)) - 1) < 0.05


def test_top_eigenvalue_block_within_its_root_enclosure():
    lam = top_eigenvalue(block_P(1, 3), 128)
    assert lam.lo <= lam.value <= lam.hi
    assert lam.hi - lam.lo < mp.mpf(2) ** -100 * lam.hi
