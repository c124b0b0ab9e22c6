"""Exact arithmetic in Q(sqrt 5) and high-precision scalars.

GoldenNumber is the exact workhorse. ApproxScalar carries a correctly rounded
mpmath value and, optionally, a rigorous enclosure. LogMagnitude keeps
magnitudes as exact powers of the golden ratio.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from numbers import Rational

import mpmath
from mpmath import iv, mp

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def _sign_a_plus_b_root5(a: Fraction, b: Fraction) -> int:
    """Exact sign of a + b*sqrt(5)."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with 5 b^2
    lhs, rhs = a * a, 5 * b * b
    if lhs == rhs:
        return 0  # impossible for rationals unless both vanish
    return sa if lhs > rhs else sb


@total_ordering
class GoldenNumber:
    """Exact element a + b*sqrt(5) with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("GoldenNumber is immutable")

    @classmethod
    def coerce(cls, x) -> GoldenNumber:
        if isinstance(x, GoldenNumber):
            return x
        return cls(_frac(x), 0)

    # arithmetic

    def __add__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return GoldenNumber(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return GoldenNumber(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return GoldenNumber(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return GoldenNumber(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> GoldenNumber:
        """Galois conjugate a - b*sqrt(5)."""
        return GoldenNumber(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def inverse(self) -> GoldenNumber:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GoldenNumber division by zero")
        return GoldenNumber(self.a / n, -self.b / n)

    def __truediv__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = GoldenNumber(1)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison

    def sign(self) -> int:
        return _sign_a_plus_b_root5(self.a, self.b)

    def __eq__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        try:
            o = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(to_approx(self, 64).value)

    def __repr__(self):
        return f"GoldenNumber({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt5" if self.b > 0 else f"{self.a} - {-self.b}*sqrt5"


def golden_phi() -> GoldenNumber:
    """The golden ratio (1 + sqrt 5)/2."""
    return GoldenNumber(Fraction(1, 2), Fraction(1, 2))


ROOT5 = GoldenNumber(0, 1)
TWO_OVER_ROOT5 = GoldenNumber(0, Fraction(2, 5))


def phi_power(n: int) -> GoldenNumber:
    # phi^n = (L_n + F_n sqrt5)/2 with Lucas/Fibonacci numbers, also for n < 0
    f, lucas = fibonacci(abs(n)), lucas_number(abs(n))
    if n < 0 and n % 2:
        return GoldenNumber(Fraction(-lucas, 2), Fraction(f, 2))
    if n < 0:
        return GoldenNumber(Fraction(lucas, 2), Fraction(-f, 2))
    return GoldenNumber(Fraction(lucas, 2), Fraction(f, 2))


def c_value(a: int) -> GoldenNumber:
    """(2/sqrt 5) * phi^(2a), exact."""
    if a < 0:
        raise ValueError("c_value needs a >= 0")
    return TWO_OVER_ROOT5 * phi_power(2 * a)


def _fib_pair(n: int) -> tuple[int, int]:
    # fast doubling: (F_n, F_{n+1})
    if n == 0:
        return 0, 1
    f, g = _fib_pair(n >> 1)
    c = f * (2 * g - f)
    d = f * f + g * g
    return (d, c + d) if n & 1 else (c, d)


def fibonacci(n: int) -> int:
    if n < 0:
        raise ValueError("fibonacci needs n >= 0")
    return _fib_pair(n)[0]


def lucas_number(n: int) -> int:
    f, g = _fib_pair(n)
    return 2 * g - f


# approximate scalars


@contextlib.contextmanager
def interval_precision(bits: int):
    """Temporarily set the precision of the mpmath interval context."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _as_iv(lo, hi):
    return iv.mpf([lo, hi])


@dataclass(frozen=True)
class ApproxScalar:
    """A real value at a declared binary precision, optionally with bounds.

    `lo` and `hi` are None outside interval mode. In interval mode the true
    value is guaranteed to lie in [lo, hi].
    """

    value: mpmath.mpf
    precision: int = DEFAULT_PRECISION
    lo: mpmath.mpf | None = None
    hi: mpmath.mpf | None = None

    @property
    def is_interval(self) -> bool:
        return self.lo is not None

    def width(self):
        if not self.is_interval:
            return None
        with mp.workprec(self.precision):
            return self.hi - self.lo

    def contains(self, x) -> bool:
        if not self.is_interval:
            raise ValueError("not in interval mode")
        with mp.workprec(self.precision + 64):
            return self.lo <= mp.mpf(x) <= self.hi

    def encloses(self, other: ApproxScalar) -> bool:
        return self.is_interval and other.is_interval and self.lo <= other.lo and other.hi <= self.hi

    def straddles_zero(self) -> bool:
        return self.is_interval and self.lo <= 0 <= self.hi

    def __float__(self):
        return float(self.value)

    def to_iv(self):
        if self.is_interval:
            return _as_iv(self.lo, self.hi)
        return iv.mpf(self.value)

    @classmethod
    def from_iv(cls, x, precision: int) -> ApproxScalar:
        lo, hi = (mp.make_mpf(t) for t in x._mpi_)
        with mp.workprec(precision):
            mid = (lo + hi) / 2
        return cls(mid, precision, lo, hi)

    def _binary(self, other, op):
        if isinstance(other, ApproxScalar):
            prec = min(self.precision, other.precision)
            interval = self.is_interval and other.is_interval
            o_iv, o_val = other.to_iv(), other.value
        else:
            prec = self.precision
            interval = self.is_interval
            o_iv, o_val = iv.mpf(other), mp.mpf(other)
        with mp.workprec(prec):
            val = +op(self.value, o_val)
        if not interval:
            return ApproxScalar(val, prec)
        with interval_precision(prec):
            x = op(self.to_iv(), o_iv)
        lo, hi = (mp.make_mpf(t) for t in x._mpi_)
        return ApproxScalar(val, prec, lo, hi)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y)

    def sqrt(self) -> ApproxScalar:
        if self.value < 0 or (self.is_interval and self.hi < 0):
            raise ValueError("square root of a negative value")
        with mp.workprec(self.precision):
            val = mp.sqrt(self.value)
        if not self.is_interval:
            return ApproxScalar(val, self.precision)
        with interval_precision(self.precision):
            x = iv.sqrt(_as_iv(max(self.lo, mp.zero), self.hi))
        lo, hi = (mp.make_mpf(t) for t in x._mpi_)
        return ApproxScalar(val, self.precision, lo, hi)

    def exp(self) -> ApproxScalar:
        with mp.workprec(self.precision):
            val = mp.exp(self.value)
        if not self.is_interval:
            return ApproxScalar(val, self.precision)
        with interval_precision(self.precision):
            x = iv.exp(self.to_iv())
        lo, hi = (mp.make_mpf(t) for t in x._mpi_)
        return ApproxScalar(val, self.precision, lo, hi)

    def __neg__(self):
        if self.is_interval:
            return ApproxScalar(-self.value, self.precision, -self.hi, -self.lo)
        return ApproxScalar(-self.value, self.precision)

    def __repr__(self):
        digits = max(6, int(self.precision * 0.30103) - 2)
        text = mpmath.nstr(self.value, min(digits, 30))
        if self.is_interval:
            return f"ApproxScalar({text}, prec={self.precision}, in [{mpmath.nstr(self.lo, 12)}, {mpmath.nstr(self.hi, 12)}])"
        return f"ApproxScalar({text}, prec={self.precision})"


def _integer_form(x: GoldenNumber) -> tuple[int, int, int]:
    """(P, Q, D) with x = (P + Q sqrt5)/D and D > 0."""
    d = x.a.denominator * x.b.denominator // _gcd(x.a.denominator, x.b.denominator)
    return x.a.numerator * (d // x.a.denominator), x.b.numerator * (d // x.b.denominator), d


def _gcd(p: int, q: int) -> int:
    while q:
        p, q = q, p % q
    return p


def floor_scaled(x: GoldenNumber, s: int) -> tuple[int, bool]:
    """Return (floor(x * 2**s), exact) where exact means x * 2**s is an integer."""
    p, q, d = _integer_form(x)
    if s >= 0:
        p, q = p << s, q << s
    else:
        d = d << -s
    if q == 0:
        return p // d, p % d == 0
    r = isqrt(5 * q * q)  # floor(|q| sqrt5), never exact
    irr = r if q > 0 else -(r + 1)
    return (p + irr) // d, False


def _round_to_bits(x: GoldenNumber, bits: int, mode: str) -> mpmath.mpf:
    """Round x to a binary float with `bits` significant bits.

    mode is "nearest" (ties to even), "floor" or "ceil".
    """
    sgn = x.sign()
    if sgn == 0:
        return mp.mpf(0)
    mag = abs(x)
    # crude exponent estimate, then adjust until the floor has bits+2 bits
    p, q, d = _integer_form(mag)
    e = max(p.bit_length(), (q * q * 5).bit_length() // 2) - d.bit_length()
    s = bits + 1 - e
    while True:
        m, exact = floor_scaled(mag, s)
        if m.bit_length() < bits + 2:
            s += bits + 2 - m.bit_length()
        elif m.bit_length() > bits + 2:
            s -= m.bit_length() - (bits + 2)
        else:
            break
    q, rem = m >> 2, m & 3
    inexact_tail = (rem != 0) or not exact
    if mode == "nearest":
        if rem > 2 or (rem == 2 and not exact) or (rem == 2 and exact and q & 1):
            q += 1
    else:
        # directed rounding of |x|, then account for the sign
        up = (mode == "ceil") == (sgn > 0)
        if up and inexact_tail:
            q += 1
    return mp.mpf((sgn * q, -(s - 2)))


def to_approx(x, precision_bits: int = DEFAULT_PRECISION, interval: bool = True) -> ApproxScalar:
    """Correctly rounded conversion of a GoldenNumber (or rational) to an ApproxScalar."""
    if precision_bits < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits")
    x = GoldenNumber.coerce(x)
    with mp.workprec(precision_bits):
        value = _round_to_bits(x, precision_bits, "nearest")
        if not interval:
            return ApproxScalar(value, precision_bits)
        lo = _round_to_bits(x, precision_bits, "floor")
        hi = _round_to_bits(x, precision_bits, "ceil")
    return ApproxScalar(value, precision_bits, lo, hi)


def golden_to_iv(x: GoldenNumber, precision_bits: int):
    """Interval enclosure of x as an mpmath iv number."""
    s = to_approx(x, precision_bits)
    return _as_iv(s.lo, s.hi)


@total_ordering
@dataclass(frozen=True)
class LogMagnitude:
    """sign * phi**exponent with an exact rational exponent."""

    exponent: Fraction
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "exponent", _frac(self.exponent))
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")

    def __mul__(self, other: LogMagnitude) -> LogMagnitude:
        return LogMagnitude(self.exponent + other.exponent, self.sign * other.sign)

    def __truediv__(self, other: LogMagnitude) -> LogMagnitude:
        return LogMagnitude(self.exponent - other.exponent, self.sign * other.sign)

    def __lt__(self, other: LogMagnitude):
        if self.sign != other.sign:
            return self.sign < other.sign
        return self.exponent < other.exponent if self.sign > 0 else self.exponent > other.exponent

    def to_golden(self) -> GoldenNumber:
        if self.exponent.denominator != 1:
            raise ValueError("only integer exponents are exact in Q(sqrt5)")
        return self.sign * phi_power(int(self.exponent))

    def to_approx(self, precision_bits: int = DEFAULT_PRECISION) -> ApproxScalar:
        with mp.workprec(precision_bits + 20):
            phi = (1 + mp.sqrt(5)) / 2
            v = self.sign * mp.power(phi, mp.mpf(self.exponent.numerator) / self.exponent.denominator)
        with mp.workprec(precision_bits):
            return ApproxScalar(+v, precision_bits)

    def __str__(self):
        s = "-" if self.sign < 0 else ""
        return f"{s}phi^({self.exponent})"


def phi_log(x) -> mpmath.mpf:
    """log base phi of |x| for a positive real-like value (float reporting only)."""
    with mp.workprec(DEFAULT_PRECISION):
        phi = (1 + mp.sqrt(5)) / 2
        return mp.log(abs(mp.mpf(x))) / mp.log(phi)
