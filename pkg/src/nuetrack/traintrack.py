"""Weight calculus on the nine chosen branches of the invariant train track.

Vectors are columns and matrices act on the left, so a composite mapping
class f∘g corresponds to the matrix product F·G.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from mpmath import mp

from .exactnum import DEFAULT_PRECISION, ApproxScalar, GoldenNumber

N = 9


class Generator(enum.Enum):
    TAFFY = "tau"  # the taffy puller
    TAFFY_ROT = "tau∘rho"  # taffy puller after the rotation


class InvalidSequence(ValueError):
    """A gap sequence that violates r1 = 1, r2 = 2 or strictly increasing gaps."""


class SequenceTooShort(IndexError):
    pass


class ConvergenceError(RuntimeError):
    pass


_TAFFY_ROWS = (
    (1, 0, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 1, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 0, 1, 1, 1, 1),
    (0, 0, 0, 1, 1, 2, 0, 1, 2),
)

_TAFFY_ROT_ROWS = (
    (0, 0, 0, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 0, 0, 1, 0),
    (0, 1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 1, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 1, 0, 0),
    (1, 0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0, 0, 0),
)


def as_matrix(rows) -> np.ndarray:
    """Object-dtype 9x9 matrix (exact Python ints or GoldenNumbers)."""
    m = np.empty((N, N), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            m[i, j] = x
    return m


def identity() -> np.ndarray:
    return as_matrix([[int(i == j) for j in range(N)] for i in range(N)])


def unit_vector(k: int) -> np.ndarray:
    """e_k with the 1-based indexing used for branches."""
    v = np.zeros(N, dtype=object)
    v[:] = 0
    v[k - 1] = 1
    return v


def element_kind(m: np.ndarray) -> str:
    kinds = {type(x) for x in m.flat}
    if kinds <= {int}:
        return "integer"
    if kinds <= {int, Fraction, GoldenNumber}:
        return "golden"
    return "approx"


def generator_matrix(g: Generator) -> np.ndarray:
    if g is Generator.TAFFY:
        return as_matrix(_TAFFY_ROWS)
    if g is Generator.TAFFY_ROT:
        return as_matrix(_TAFFY_ROT_ROWS)
    raise ValueError(f"unknown generator {g!r}")


def mat_pow(m: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        raise ValueError("negative powers are not supported")
    result, base = identity(), m
    while e:
        if e & 1:
            result = result.dot(base)
        base = base.dot(base)
        e >>= 1
    return result


@lru_cache(maxsize=512)
def _taffy_power(a: int) -> np.ndarray:
    return mat_pow(generator_matrix(Generator.TAFFY), a)


def taffy_power(a: int) -> np.ndarray:
    return _taffy_power(a).copy()


def phi_matrix(r: int) -> np.ndarray:
    """A^(r-1) M, the matrix of tau^r ∘ rho."""
    if r < 1:
        raise ValueError("phi_matrix needs r >= 1")
    return _taffy_power(r - 1).dot(generator_matrix(Generator.TAFFY_ROT))


def block_P(a_lo: int, a_hi: int) -> np.ndarray:
    """A^a_lo M A^a_hi M over the integers."""
    if a_lo < 0 or a_hi < 0:
        raise ValueError("block exponents must be nonnegative")
    m = generator_matrix(Generator.TAFFY_ROT)
    return _taffy_power(a_lo).dot(m).dot(_taffy_power(a_hi)).dot(m)


def determinant(m: np.ndarray):
    """Exact determinant by fraction-free Bareiss elimination."""
    a = [[m[i, j] for j in range(N)] for i in range(N)]
    sign, prev = 1, 1
    for k in range(N - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, N) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, N):
            for j in range(k + 1, N):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
        prev = a[k][k]
    return sign * a[N - 1][N - 1]


def is_nonnegative(m) -> bool:
    return all(x >= 0 for x in np.asarray(m).flat)


# gap sequences


@dataclass(frozen=True)
class GapSequence:
    """r_1, r_2, ... with r_1 = 1, r_2 = 2 and strictly increasing differences."""

    r: tuple[int, ...]
    name: str = "explicit"

    def __post_init__(self):
        r = tuple(int(x) for x in self.r)
        object.__setattr__(self, "r", r)
        if len(r) < 2 or r[0] != 1 or r[1] != 2:
            raise InvalidSequence("a gap sequence must start with r1 = 1, r2 = 2")
        gaps = [y - x for x, y in zip(r, r[1:])]
        if any(h <= g for g, h in zip(gaps, gaps[1:])):
            raise InvalidSequence("the differences r_(n+1) - r_n must be strictly increasing")

    @classmethod
    def default(cls, length: int = 64) -> GapSequence:
        return cls(tuple(1 + n * (n - 1) // 2 for n in range(1, length + 1)), "quadratic")

    @classmethod
    def from_formula(cls, formula: str, length: int = 64) -> GapSequence:
        builders = {
            "quadratic": lambda n: 1 + n * (n - 1) // 2,
            "cubic": lambda n: 1 + (n - 1) * n * (n + 1) // 6,
            "exponential": lambda n: 2 ** (n - 1),
        }
        if formula not in builders:
            raise InvalidSequence(f"unknown formula {formula!r}; known: {sorted(builders)}")
        return cls(tuple(builders[formula](n) for n in range(1, length + 1)), formula)

    @classmethod
    def parse(cls, text: str, length: int = 64) -> GapSequence:
        """A formula name or a comma separated list of integers."""
        text = text.strip()
        if re.fullmatch(r"[A-Za-z_]+", text):
            return cls.from_formula(text, length)
        try:
            values = tuple(int(t) for t in text.split(",") if t.strip())
        except ValueError as exc:
            raise InvalidSequence(f"cannot parse gap sequence {text!r}") from exc
        return cls(values)

    def __len__(self):
        return len(self.r)

    def r_at(self, i: int) -> int:
        if i < 1:
            raise IndexError("indices start at 1")
        if i > len(self.r):
            raise SequenceTooShort(f"index {i} beyond the {len(self.r)} given terms")
        return self.r[i - 1]

    def a_at(self, i: int) -> int:
        return self.r_at(i) - 1

    def gap(self, i: int) -> int:
        """a_(i+1) - a_i."""
        return self.a_at(i + 1) - self.a_at(i)


def P_block(i: int, seq: GapSequence) -> np.ndarray:
    """P_i = A^(a_i) M A^(a_(i+1)) M for the given sequence."""
    return block_P(seq.a_at(i), seq.a_at(i + 1))


def gamma_vector(n: int, seq: GapSequence | None = None) -> np.ndarray:
    """Exact branch weights v_n of gamma_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    seq = seq or GapSequence.default()
    if n > len(seq.r):
        raise SequenceTooShort(f"gamma_vector({n}) needs {n} terms, sequence has {len(seq.r)}")
    v = unit_vector(9) if n % 2 == 0 else unit_vector(2)
    for i in range(2 * (n // 2) - 1, 0, -2):
        v = P_block(i, seq).dot(v)
    return v


def gamma_vector_by_maps(n: int, seq: GapSequence | None = None) -> np.ndarray:
    """v_n as phi_(r_1) ... phi_(r_n) applied to v_0, one map at a time."""
    seq = seq or GapSequence.default()
    v = unit_vector(9)
    for i in range(n, 0, -1):
        v = phi_matrix(seq.r_at(i)).dot(v)
    return v


# spectral data


def _sympy_matrix(m: np.ndarray) -> sympy.Matrix:
    return sympy.Matrix(N, N, [sympy.Rational(x) for x in m.flat])


def characteristic_polynomial(m: np.ndarray) -> sympy.Poly:
    x = sympy.Symbol("x")
    return _sympy_matrix(m).charpoly(x)


def top_eigenvalue(m: np.ndarray, precision_bits: int = DEFAULT_PRECISION) -> ApproxScalar:
    """Dominant eigenvalue with a certified enclosure.

    Exact (integer or rational) nonnegative matrices go through real root
    isolation of the characteristic polynomial; by Perron-Frobenius the
    largest real root is the spectral radius. Other inputs fall back to a
    high-precision eigen solve with dominant-by-modulus semantics.
    """
    kind = element_kind(m)
    if kind in ("integer",) or all(isinstance(x, (int, Fraction)) for x in m.flat):
        if not is_nonnegative(m):
            raise ValueError("certified path needs a nonnegative matrix")
        poly = characteristic_polynomial(m)
        roots = poly.intervals()
        if not roots:
            raise ConvergenceError("no real eigenvalue found")
        (lo, hi), _ = max(roots, key=lambda t: t[0][1])
        lo, hi = Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))
        scale = max(abs(hi), Fraction(1))
        eps = scale / (Fraction(2) ** (precision_bits + 4))
        if hi - lo > eps:
            lo_s, hi_s = poly.refine_root(sympy.Rational(lo.numerator, lo.denominator),
                                          sympy.Rational(hi.numerator, hi.denominator), eps=sympy.Rational(eps.numerator, eps.denominator))
            lo, hi = Fraction(int(lo_s.p), int(lo_s.q)), Fraction(int(hi_s.p), int(hi_s.q))
        from .exactnum import to_approx

        lo_a = to_approx(GoldenNumber(lo), precision_bits)
        hi_a = to_approx(GoldenNumber(hi), precision_bits)
        with mp.workprec(precision_bits):
            mid = (lo_a.lo + hi_a.hi) / 2
        return ApproxScalar(mid, precision_bits, lo_a.lo, hi_a.hi)
    with mp.workprec(precision_bits + 32):
        mm = mp.matrix([[mp.mpf(float(x)) if not isinstance(x, GoldenNumber) else
                         mp.mpf(x.a.numerator) / x.a.denominator + mp.sqrt(5) * mp.mpf(x.b.numerator) / x.b.denominator
                         for x in row] for row in m])
        eigenvalues = mp.eig(mm, left=False, right=False)
        top = max(eigenvalues, key=abs)
        value = mp.re(top) if abs(mp.im(top)) < mp.mpf(2) ** (-precision_bits // 2) * abs(top) else top
    with mp.workprec(precision_bits):
        return ApproxScalar(+value, precision_bits)


def power_iteration(m: np.ndarray, tol: float = 1e-30, max_iter: int = 10_000, precision_bits: int = 256):
    """Dominant eigenvalue estimate by normalized power iteration.

    Raises ConvergenceError if the Rayleigh estimates do not settle within
    max_iter steps.
    """
    with mp.workprec(precision_bits):
        mm = mp.matrix([[mp.mpf(int(x)) if isinstance(x, int) else mp.mpf(x) for x in row] for row in m])
        v = mp.matrix([1] * N)
        estimate = mp.mpf(0)
        for _ in range(max_iter):
            w = mm * v
            norm = mp.norm(w)
            if norm == 0:
                return mp.mpf(0)
            new = norm / mp.norm(v)
            v = w / norm
            if abs(new - estimate) <= tol * abs(new):
                return new
            estimate = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
