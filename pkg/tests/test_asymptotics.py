from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp

from nuetrack.asymptotics import (
    epsilon_norm,
    fit_constants,
    frobenius,
    hat_block,
    jordan_basis,
    limit_matrix,
    matrix_inverse,
    matrix_rank,
    normalized_block,
    product_convergence_harness,
    renormed_family,
    residual_grid,
    tail_product,
    trace,
)
from nuetrack.exactnum import GoldenNumber, c_value, golden_phi, to_approx
from nuetrack.traintrack import GapSequence, InvalidSequence, P_block, block_P

SQRT5 = sp.sqrt(5)


def sym_c(a):
    return 2 / SQRT5 * ((1 + SQRT5) / 2) ** (2 * a)


def sym(x: GoldenNumber):
    return sp.Rational(x.a.numerator, x.a.denominator) + SQRT5 * sp.Rational(x.b.numerator, x.b.denominator)


def sym_matrix(m):
    return sp.Matrix(9, 9, [sym(GoldenNumber.coerce(x)) for x in np.asarray(m).flat])


def test_hat_first_row():
    for a, b in [(0, 0), (1, 3), (4, 9)]:
        h = hat_block(a, b)
        assert h[0, 6] == 1
        assert all(h[0, j] == 0 for j in range(9) if j != 6)


def test_hat_scaled_entries():
    h = hat_block(2, 5)
    assert h[1, 1] == c_value(5) / 2
    assert h[8, 0] == GoldenNumber(Fraction(3, 4), Fraction(1, 4)) * c_value(2)


def test_hat_zero_zero_substitution():
    c0 = c_value(0)
    assert c0 == GoldenNumber(0, Fraction(2, 5))
    h = hat_block(0, 0)
    assert h[1, 1] == c0 / 2
    assert all(isinstance(x, GoldenNumber) for x in h.flat)


def test_hat_approximates_block_up_to_25():
    worst = 0.0
    for a in range(1, 26):
        for b in range(a + 1, 26):
            d = block_P(a, b) - hat_block(a, b)
            worst = max(worst, float(frobenius(to_float(d))))
    assert worst < 10


def to_float(m):
    return np.vectorize(lambda x: float(GoldenNumber.coerce(x)), otypes=[object])(m)


def test_limit_matrix_shape():
    L = limit_matrix()
    assert matrix_rank(L) == 1
    assert trace(L) == 1
    for r in range(9):
        for c in range(9):
            if L[r, c] != 0:
                assert r in (1, 2) and c + 1 in (1, 2, 3, 4, 5, 7)


def test_limit_matrix_on_v1():
    L = limit_matrix()
    v = L.dot(np.array([GoldenNumber(0), GoldenNumber(1)] + [GoldenNumber(0)] * 7, dtype=object))
    expected = [0, Fraction(1, 2), GoldenNumber(Fraction(-1, 4), Fraction(1, 4))] + [0] * 6
    assert [GoldenNumber.coerce(x) for x in v] == [GoldenNumber.coerce(x) for x in expected]


def test_limit_matrix_top_eigenvalue_is_one():
    L = sym_matrix(limit_matrix())
    assert sp.simplify(L * L - L) == sp.zeros(9, 9)
    assert L.rank() == 1


def test_limit_matrix_is_entrywise_limit():
    seq = GapSequence.default()
    L = sym_matrix(limit_matrix())
    r = sym_matrix(normalized_block(12, seq))
    bound = 4 * float(golden_phi()) ** (-2 * seq.gap(12))
    assert max(abs(float(x)) for x in (r - L)) < bound


def sym_epsilon_norm(i, seq):
    # independent route: integer block, sympy surd arithmetic, float only at the end
    P = sp.Matrix(P_block(i, seq).tolist())
    R = P / sym_c(seq.a_at(i + 1))
    d = R - sym_matrix(limit_matrix())
    return float(sp.sqrt(sum(sp.nsimplify(sp.expand(x)) ** 2 for x in d)).evalf(40))


def test_epsilon_norm_matches_independent_route():
    seq = GapSequence.default()
    for i in (2, 3, 5):
        rep = epsilon_norm(i, seq)
        assert abs(float(rep.norm.value) / sym_epsilon_norm(i, seq) - 1) < 1e-12


def test_epsilon_norm_decreasing_with_single_constant():
    seq = GapSequence.default()
    reps = [epsilon_norm(i, seq) for i in range(2, 13)]
    norms = [r.norm.value for r in reps]
    assert all(b < a for a, b in zip(norms, norms[1:]))
    ratios = [float(r.ratio.value) for r in reps]
    K = max(max(ratios), 1 / min(ratios))
    assert all(1 / K <= q <= K for q in ratios)
    assert K < 10


def test_epsilon_norm_interval_encloses():
    rep = epsilon_norm(3, GapSequence.default())
    assert rep.norm.lo <= rep.norm.value <= rep.norm.hi
    assert rep.benchmark.exponent == -2 * GapSequence.default().gap(3)


def test_epsilon_norm_rejects_constant_gaps():
    with pytest.raises(InvalidSequence):
        epsilon_norm(2, (1, 2, 3, 4, 5, 6))
    with pytest.raises(ValueError):
        epsilon_norm(0, GapSequence.default())


def test_tail_product_single_factor(seq):
    t = tail_product(4, 0, seq)
    e = epsilon_norm(4, seq)
    assert abs(t.residual.value - e.norm.value) <= mp.mpf(2) ** -200 * e.norm.value
    assert t.first_order_bound.value == 0
    assert (t.product == normalized_block(4, seq)).all()


def test_tail_product_bounds_on_grid(seq):
    rows = residual_grid(seq, range(2, 9), range(0, 7))
    fit = fit_constants(rows)
    for r in rows:
        assert r.residual.value <= fit.C * r.bound.value * (1 + 1e-12)
    assert fit.floor > 1
    assert fit.C < 5 and fit.C_prime < 5


def test_tail_product_precision_refinement(seq):
    a, b = tail_product(3, 2, seq, 128), tail_product(3, 2, seq, 256)
    assert a.residual.encloses(b.residual)


def test_harness_idempotent_constant():
    e = np.zeros((2, 2))
    e[0, 0] = 1.0
    rep = product_convergence_harness([(e, np.zeros((2, 2)))] * 6)
    assert all(d == 0 for d in rep.cauchy_differences)
    assert rep.norm_violations == [] and rep.summable


def test_harness_flags_harmonic_family():
    e = np.zeros((2, 2))
    e[0, 0] = 1.0
    fam = []
    for l in range(1, 129):
        d = np.zeros((2, 2))
        d[0, 0] = 1.0 / l
        fam.append((e, d))
    assert not product_convergence_harness(fam).summable


def test_harness_norm_violation():
    rep = product_convergence_harness([(2 * np.eye(2), np.zeros((2, 2)))])
    assert rep.norm_violations == [1]


def test_jordan_basis_diagonalises_L():
    u = jordan_basis()
    d = matrix_inverse(u).dot(limit_matrix()).dot(u)
    for r in range(9):
        for c in range(9):
            assert d[r, c] == (1 if r == c == 0 else 0)


def test_harness_on_block_family(seq):
    rep = product_convergence_harness(renormed_family(2, 9, seq))
    assert rep.norm_violations == [] and rep.summable and rep.within_bounds


@given(st.integers(0, 12), st.integers(0, 12))
def test_hat_block_entries_exact(a, b):
    h = hat_block(a, b)
    assert all(isinstance(x, (int, GoldenNumber)) or x == 0 for x in h.flat)
    assert h[1, 1] == c_value(b) / 2


@given(st.integers(1, 40))
def test_hat_block_ratio_rows(a):
    # rows carrying the upper constant scale by phi^2 when it is raised by one
    h1, h2 = hat_block(0, a), hat_block(0, a + 1)
    assert h2[1, 1] == h1[1, 1] * golden_phi() ** 2
