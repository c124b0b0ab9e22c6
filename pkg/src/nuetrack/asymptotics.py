"""Normalized blocks, the rank-one limit matrix and products of perturbations.

Everything that can be exact is exact: R_i, L and R_i - L live in Q(sqrt 5)
and Frobenius norms are taken by squaring exactly and enclosing the square
root in an interval at the requested precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from mpmath import mp

from .exactnum import (
    DEFAULT_PRECISION,
    ApproxScalar,
    GoldenNumber,
    LogMagnitude,
    c_value,
    to_approx,
)
from .traintrack import N, GapSequence, P_block, as_matrix, identity

_Q = Fraction(1, 4)
_R5 = GoldenNumber(0, 1)
# coefficient patterns of the hat matrix, written as multiples of 1/4
_M1 = _Q * (_R5 - 1)  # (-1 + sqrt5)/4
_P1 = _Q * (_R5 + 1)  # (1 + sqrt5)/4
_P3 = _Q * (_R5 + 3)  # (3 + sqrt5)/4
_M3 = _Q * (3 - _R5)  # (3 - sqrt5)/4
_H = GoldenNumber(Fraction(1, 2))

# rows 2 and 3 scale with the upper constant, rows 8 and 9 with the lower one
_UPPER_ROWS = {
    1: (_M1, _H, _P1, _P3, _H, 0, _P3, 0, 0),
    2: (_M3, _M1, _H, _P1, _M1, 0, _P1, 0, 0),
}
_LOWER_ROWS = {
    7: (_P1, _P1, _P1, _M1, _M1, _M3, 0, _H, _M1),
    8: (_P3, _P3, _P3, _H, _H, _M1, 0, _P1, _H),
}
_CONSTANT_ROWS = {
    0: (0, 0, 0, 0, 0, 0, 1, 0, 0),
    3: (0, 0, 0, 0, 0, 0, 0, 0, 1),
    4: (0, 1, 0, 1, 1, 0, 0, 0, 0),
    5: (1, 0, 1, 0, 0, 0, 0, 0, 0),
    6: (0, 0, 0, 0, 0, 1, 0, 1, 0),
}

GROUP_ONE = (1, 2, 3, 4, 5, 7)
GROUP_TWO = (6, 8, 9)


def hat_block(a_lo: int, a_hi: int) -> np.ndarray:
    """Leading-order model of block_P(a_lo, a_hi) in exact golden entries."""
    c_lo, c_hi = c_value(a_lo), c_value(a_hi)
    rows = [None] * N
    for k, row in _CONSTANT_ROWS.items():
        rows[k] = [GoldenNumber.coerce(x) for x in row]
    for k, row in _UPPER_ROWS.items():
        rows[k] = [GoldenNumber.coerce(x) * c_hi for x in row]
    for k, row in _LOWER_ROWS.items():
        rows[k] = [GoldenNumber.coerce(x) * c_lo for x in row]
    return as_matrix(rows)


def limit_matrix() -> np.ndarray:
    """The rank-one limit of block_P / c(a_hi) as the gap grows."""
    rows = [[GoldenNumber(0)] * N for _ in range(N)]
    for k, row in _UPPER_ROWS.items():
        rows[k] = [GoldenNumber.coerce(x) for x in row]
    return as_matrix(rows)


def golden_matrix(m: np.ndarray) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        out[idx] = GoldenNumber.coerce(x)
    return out


def frobenius_squared(m: np.ndarray) -> GoldenNumber:
    total = GoldenNumber(0)
    for x in m.flat:
        total = total + x * x
    return GoldenNumber.coerce(total)


def frobenius_norm(m: np.ndarray, precision_bits: int = DEFAULT_PRECISION) -> ApproxScalar:
    """Certified Frobenius norm of an exact matrix."""
    return to_approx(frobenius_squared(m), precision_bits).sqrt()


def matrix_rank(m: np.ndarray) -> int:
    """Exact rank by Gaussian elimination over the field of the entries."""
    a = [[GoldenNumber.coerce(x) for x in row] for row in m]
    rank, cols = 0, len(a[0])
    for col in range(cols):
        pivot = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = a[rank][col].inverse()
        for r in range(len(a)):
            if r != rank and a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def matrix_inverse(m: np.ndarray) -> np.ndarray:
    """Exact inverse by Gauss-Jordan elimination."""
    n = m.shape[0]
    a = [[GoldenNumber.coerce(x) for x in row] + [GoldenNumber(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return as_matrix([row[n:] for row in a])


def trace(m: np.ndarray):
    return sum((m[i, i] for i in range(m.shape[0])), GoldenNumber(0))


def normalized_block(i: int, seq: GapSequence) -> np.ndarray:
    """R_i = P_i / c(a_(i+1)), exact."""
    inv_c = c_value(seq.a_at(i + 1)).inverse()
    return golden_matrix(P_block(i, seq)) * inv_c


def epsilon_matrix(i: int, seq: GapSequence) -> np.ndarray:
    return normalized_block(i, seq) - limit_matrix()


@dataclass(frozen=True)
class EpsilonReport:
    i: int
    norm: ApproxScalar
    benchmark: LogMagnitude  # phi^(-2 gap)
    ratio: ApproxScalar


def epsilon_norm(i: int, seq: GapSequence, precision_bits: int = DEFAULT_PRECISION) -> EpsilonReport:
    """Frobenius norm of R_i - L next to the exact benchmark phi^(-2 gap)."""
    if i < 1:
        raise ValueError("i must be at least 1")
    if not isinstance(seq, GapSequence):
        seq = GapSequence(tuple(seq))
    norm = frobenius_norm(epsilon_matrix(i, seq), precision_bits)
    bench = LogMagnitude(-2 * seq.gap(i))
    ratio = norm / to_approx(bench.to_golden(), precision_bits)
    return EpsilonReport(i, norm, bench, ratio)


@dataclass(frozen=True)
class TailResidual:
    i: int
    k: int
    product: np.ndarray = field(repr=False)
    product_norm: ApproxScalar
    residual: ApproxScalar  # |Pi - L|
    first_order_residual: ApproxScalar  # |Pi - (L + eps_i L)|
    bound: ApproxScalar  # exp(sum_{l=0..k} |eps|) - 1
    first_order_bound: ApproxScalar  # exp(sum_{l=1..k} |eps|) - 1
    phi_exponent: int  # exponent of the leading benchmark phi^(-2 gap_i)


def tail_product(i: int, k: int, seq: GapSequence, precision_bits: int = DEFAULT_PRECISION) -> TailResidual:
    """R_i R_(i+2) ... R_(i+2k) with residuals against L and L + eps_i L."""
    if i < 1 or k < 0:
        raise ValueError("need i >= 1 and k >= 0")
    L = limit_matrix()
    prod = None
    norms = []
    for l in range(k + 1):
        r = normalized_block(i + 2 * l, seq)
        prod = r if prod is None else prod.dot(r)
        norms.append(frobenius_norm(r - L, precision_bits))
    eps_i = normalized_block(i, seq) - L
    first_order = L + eps_i.dot(L)
    zero = to_approx(GoldenNumber(0), precision_bits)
    total = sum(norms, zero)
    tail = sum(norms[1:], zero)
    return TailResidual(
        i=i,
        k=k,
        product=prod,
        product_norm=frobenius_norm(prod, precision_bits),
        residual=frobenius_norm(prod - L, precision_bits),
        first_order_residual=frobenius_norm(prod - first_order, precision_bits),
        bound=total.exp() - 1,
        first_order_bound=tail.exp() - 1,
        phi_exponent=-2 * seq.gap(i),
    )


def residual_grid(seq: GapSequence, i_values: Sequence[int], k_values: Sequence[int],
                  precision_bits: int = DEFAULT_PRECISION) -> list[TailResidual]:
    return [tail_product(i, k, seq, precision_bits) for i in i_values for k in k_values]


def _safe_ratio(num: ApproxScalar, den: ApproxScalar):
    with mp.workprec(num.precision):
        if den.value == 0:
            return mp.zero if num.value == 0 else mp.inf
        return num.value / den.value


@dataclass(frozen=True)
class FittedConstants:
    C: object  # for |Pi - L| <= C (exp(sum) - 1)
    C_prime: object  # for the first-order residual
    floor: object  # smallest Frobenius norm of a product on the grid


def fit_constants(rows: Sequence[TailResidual]) -> FittedConstants:
    """Smallest constants making both residual inequalities hold on the grid.

    Entries with a zero bound (k = 0 in the first-order inequality) must have
    a zero residual up to rounding and are skipped.
    """
    c = max(_safe_ratio(r.residual, r.bound) for r in rows)
    cp = max((_safe_ratio(r.first_order_residual, r.first_order_bound) for r in rows if r.k > 0),
             default=mp.zero)
    floor = min(r.product_norm.value for r in rows)
    return FittedConstants(c, cp, floor)


# the generic product harness


def frobenius(m) -> mp.mpf:
    return mp.sqrt(sum(mp.mpf(x) ** 2 for x in np.asarray(m).flat))


def to_mp_matrix(m: np.ndarray, precision_bits: int = DEFAULT_PRECISION) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        out[idx] = to_approx(GoldenNumber.coerce(x), precision_bits, interval=False).value
    return out


@dataclass
class ConvergenceReport:
    partial_products: list = field(repr=False)
    perturbation_norms: list
    cauchy_differences: list  # |S_last - S_n|
    tail_bounds: list  # rigorous upper bounds for the same quantities
    norm_violations: list  # indices whose base does not have unit norm
    summable: bool  # heuristic verdict from dyadic block sums
    basis: str = ""

    @property
    def within_bounds(self) -> bool:
        return all(d <= b for d, b in zip(self.cauchy_differences, self.tail_bounds))


def _dyadic_blocks_decay(norms: Sequence) -> bool:
    """Heuristic summability: dyadic block sums of the norms shrink geometrically.

    A harmonic family has roughly constant dyadic block sums (each about
    log 2), which fails the 3/4 contraction test.
    """
    blocks, lo = [], 1
    while lo <= len(norms):
        hi = min(2 * lo, len(norms) + 1)
        if hi - lo < lo and blocks:
            break  # drop an incomplete final block
        blocks.append(sum(norms[lo - 1:hi - 1]))
        lo = hi
    if len(blocks) < 3:
        return True
    return all(b <= 0.75 * a for a, b in zip(blocks[-3:], blocks[-2:]))


def product_convergence_harness(
    factors: Sequence[tuple[np.ndarray, np.ndarray]],
    norm: Callable = frobenius,
    precision_bits: int = DEFAULT_PRECISION,
    unit_tolerance: float = 1e-20,
) -> ConvergenceReport:
    """Partial products S_n = (B_1 + D_1)...(B_n + D_n) and their Cauchy tails.

    With |B_j| = 1 and a submultiplicative norm,
    |S_N - S_n| <= |S_n| (exp(sum_{j>n} |D_j|) - 1) + |S_n (B_(n+1)...B_N) - S_n|,
    which is the bound reported for each n.
    """
    with mp.workprec(precision_bits):
        bases = [np.vectorize(mp.mpf, otypes=[object])(b) for b, _ in factors]
        perts = [np.vectorize(mp.mpf, otypes=[object])(d) for _, d in factors]
        violations = [j for j, b in enumerate(bases, start=1) if abs(norm(b) - 1) > unit_tolerance]
        pnorms = [norm(d) for d in perts]
        partial, s = [], None
        for b, d in zip(bases, perts):
            s = (b + d) if s is None else s.dot(b + d)
            partial.append(s)
        last = partial[-1]
        diffs, bounds = [], []
        for n in range(1, len(partial) + 1):
            s_n = partial[n - 1]
            diffs.append(norm(last - s_n))
            base_tail = s_n
            for b in bases[n:]:
                base_tail = base_tail.dot(b)
            tail_sum = sum(pnorms[n:], mp.zero)
            bounds.append(norm(s_n) * (mp.exp(tail_sum) - 1) + norm(base_tail - s_n))
        summable = _dyadic_blocks_decay(pnorms)
    return ConvergenceReport(partial, pnorms, diffs, bounds, violations, summable)


def jordan_basis() -> np.ndarray:
    """A basis in which L becomes diag(1, 0, ..., 0).

    L = u w^t with u = e2 + e3/phi and w = row 2 of L. The first basis vector
    is u; the others are e_j - (w_j / w_2) e_2 for j != 2, which span ker w.
    """
    L = limit_matrix()
    w = L[1, :]
    phi_inv = GoldenNumber(Fraction(-1, 2), Fraction(1, 2))
    cols = [[GoldenNumber(0)] * N]
    cols[0][1], cols[0][2] = GoldenNumber(1), phi_inv
    for j in range(N):
        if j == 1:
            continue
        col = [GoldenNumber(0)] * N
        col[j] = GoldenNumber(1)
        col[1] = -(w[j] / w[1])
        cols.append(col)
    return as_matrix([[cols[c][r] for c in range(N)] for r in range(N)])


def renormed_family(i: int, count: int, seq: GapSequence):
    """(L, eps) pairs for R_i, R_(i+2), ... written in the Jordan basis of L."""
    u = jordan_basis()
    u_inv = matrix_inverse(u)
    base = u_inv.dot(limit_matrix()).dot(u)
    out = []
    for l in range(count):
        eps = u_inv.dot(epsilon_matrix(i + 2 * l, seq)).dot(u)
        out.append((to_mp_matrix(base), to_mp_matrix(eps)))
    return out


def identity_golden() -> np.ndarray:
    return golden_matrix(identity())
