from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from mpmath import mp

from nuetrack.exactnum import (
    GoldenNumber,
    LogMagnitude,
    c_value,
    fibonacci,
    golden_phi,
    lucas_number,
    phi_power,
    to_approx,
)

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6)
goldens = st.builds(GoldenNumber, rationals, rationals)


def test_golden_phi_value():
    assert golden_phi() == GoldenNumber(Fraction(1, 2), Fraction(1, 2))


def test_phi_minimal_polynomial():
    p = golden_phi()
    assert p * p - p - 1 == 0


def test_phi_inverse_is_phi_minus_one():
    p = golden_phi()
    assert p * (p - 1) == 1
    assert p.inverse() == p - 1


def test_c_value_at_zero():
    assert c_value(0) == GoldenNumber(0, Fraction(2, 5))


@pytest.mark.parametrize("a", range(0, 51))
def test_c_value_ratio_is_phi_squared(a):
    assert c_value(a + 1) / c_value(a) == golden_phi() ** 2


@pytest.mark.parametrize("a", range(0, 31))
def test_c_value_minus_twice_fibonacci(a):
    # Binet: (2/sqrt5) phi^(2a) - 2 F(2a) = (2/sqrt5) phi^(-2a)
    binet_tail = GoldenNumber(0, Fraction(2, 5)) * phi_power(-2 * a)
    assert c_value(a) - 2 * fibonacci(2 * a) == binet_tail


def test_c_value_positive_and_increasing():
    values = [c_value(a) for a in range(101)]
    assert all(v > 0 for v in values)
    assert all(x < y for x, y in zip(values, values[1:]))


def test_c_value_rejects_negative():
    with pytest.raises(ValueError):
        c_value(-1)


@pytest.mark.parametrize("n", range(-20, 21))
def test_phi_power_matches_repeated_product(n):
    p = golden_phi()
    assert phi_power(n) == p**n


def test_fibonacci_and_lucas_small_values():
    assert [fibonacci(n) for n in range(10)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
    assert [lucas_number(n) for n in range(6)] == [2, 1, 3, 4, 7, 11]


@given(goldens, goldens, goldens)
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert x - x == 0


@given(goldens)
def test_multiplicative_inverse(x):
    assume(x != 0)
    assert x * x.inverse() == 1
    assert x / x == 1


@given(goldens, st.integers(-6, 6))
def test_integer_powers(x, n):
    assume(x != 0)
    assert x**n * x**(-n) == 1


@given(goldens, goldens)
def test_order_agrees_with_floats(x, y):
    assume(abs(float(x) - float(y)) > 1e-9)
    assert (x < y) == (float(x) < float(y))


def test_canonical_form_reduces():
    assert GoldenNumber(Fraction(2, 4), Fraction(6, 3)) == GoldenNumber(Fraction(1, 2), 2)
    assert hash(GoldenNumber(Fraction(2, 4))) == hash(GoldenNumber(Fraction(1, 2)))


def test_to_approx_phi_128():
    s = to_approx(golden_phi(), 128)
    with mp.workprec(200):
        ref = (1 + mp.sqrt(5)) / 2
        assert abs(s.value - ref) <= mp.mpf(2) ** -127
        assert s.lo <= ref <= s.hi
    assert str(mp.nstr(s.value, 11)) == "1.6180339887"


def test_to_approx_zero_has_zero_width():
    s = to_approx(GoldenNumber(0), 96)
    assert s.value == 0 and s.lo == 0 and s.hi == 0


def test_to_approx_c_value_against_big_float():
    s = to_approx(c_value(10), 128)
    with mp.workprec(400):
        ref = 2 / mp.sqrt(5) * ((1 + mp.sqrt(5)) / 2) ** 20
        assert abs(s.value - ref) / ref < mp.mpf(2) ** -100


def test_to_approx_rejects_low_precision():
    with pytest.raises(ValueError):
        to_approx(golden_phi(), 32)


@given(goldens, st.integers(64, 200), st.integers(1, 200))
def test_intervals_nest_when_precision_grows(x, p, extra):
    coarse, fine = to_approx(x, p), to_approx(x, p + extra)
    assert coarse.encloses(fine)


@given(goldens, st.integers(64, 300))
def test_interval_encloses_true_value(x, p):
    s = to_approx(x, p)
    with mp.workprec(p + 200):
        ref = mp.mpf(x.a.numerator) / x.a.denominator + mp.sqrt(5) * mp.mpf(x.b.numerator) / x.b.denominator
        assert s.lo <= ref <= s.hi


def test_log_magnitude_multiplication_adds_exponents():
    a, b = LogMagnitude(Fraction(3)), LogMagnitude(Fraction(-5), -1)
    c = a * b
    assert c.exponent == -2 and c.sign == -1
    assert c.to_golden() == -phi_power(-2)
    assert (a / a).exponent == 0


def test_log_magnitude_ordering():
    assert LogMagnitude(-4) < LogMagnitude(-2) < LogMagnitude(1)
    assert LogMagnitude(3, -1) < LogMagnitude(-10)
