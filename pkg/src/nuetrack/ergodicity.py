"""Two limiting measures for the even and odd curves, and the evidence for them.

Intersection estimates and asymmetry products are exact monomials in 2/sqrt5
and phi. Limit vectors are propagated in interval arithmetic at a chosen
precision so that every verdict either comes with an enclosure or is
reported as inconclusive.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

import numpy as np
from mpmath import iv, mp

from .asymptotics import GROUP_ONE, GROUP_TWO, golden_matrix, normalized_block
from .exactnum import (
    DEFAULT_PRECISION,
    TWO_OVER_ROOT5,
    ApproxScalar,
    GoldenNumber,
    c_value,
    interval_precision,
    phi_power,
    to_approx,
)
from .traintrack import N, GapSequence, P_block, generator_matrix, Generator, unit_vector

DEFAULT_I0 = 4


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1


class EstimateRangeWarning(UserWarning):
    """An intersection estimate was requested below the configured i0."""


@total_ordering
@dataclass(frozen=True)
class GoldenMonomial:
    """(2/sqrt5)**m * phi**N with integer exponents."""

    m: int
    N: int

    def __mul__(self, other: GoldenMonomial) -> GoldenMonomial:
        return GoldenMonomial(self.m + other.m, self.N + other.N)

    def __truediv__(self, other: GoldenMonomial) -> GoldenMonomial:
        return GoldenMonomial(self.m - other.m, self.N - other.N)

    def to_golden(self) -> GoldenNumber:
        return TWO_OVER_ROOT5 ** self.m * phi_power(self.N)

    def __eq__(self, other):
        if isinstance(other, GoldenMonomial):
            return self.to_golden() == other.to_golden()
        return self.to_golden() == GoldenNumber.coerce(other)

    def __hash__(self):
        return hash(self.to_golden())

    def __lt__(self, other):
        o = other.to_golden() if isinstance(other, GoldenMonomial) else GoldenNumber.coerce(other)
        return self.to_golden() < o

    def is_one(self) -> bool:
        return self.to_golden() == 1

    def __str__(self):
        if self.m == 0 and self.N == 0:
            return "1"
        parts = []
        if self.m:
            parts.append(f"(2/sqrt5)^{self.m}")
        if self.N:
            parts.append(f"phi^{self.N}")
        return "*".join(parts)


def c_monomial(a: int) -> GoldenMonomial:
    return GoldenMonomial(1, 2 * a)


def c_index(k: int, seq: GapSequence) -> GoldenMonomial:
    """c_k = c(a_k) as a monomial."""
    return c_monomial(seq.a_at(k))


def c_product(indices, seq: GapSequence) -> GoldenMonomial:
    out = GoldenMonomial(0, 0)
    for k in indices:
        out = out * c_index(k, seq)
    return out


def intersection_estimate(i: int, j: int, seq: GapSequence, i0: int = DEFAULT_I0) -> GoldenMonomial:
    """Product of c(a_k) for k = i+1, i+3, ..., j-1."""
    if not i < j:
        raise ValueError("need i < j")
    if (j - i) % 2:
        raise ValueError("i and j must have the same parity")
    if i < i0:
        warnings.warn(f"estimate at i={i} is below i0={i0}", EstimateRangeWarning, stacklevel=2)
    return c_product(range(i + 1, j, 2), seq)


def shifted_estimate(i: int, j: int, seq: GapSequence, i0: int = DEFAULT_I0) -> GoldenMonomial:
    """Estimate for the mixed-parity pair (i-1, j): divide out phi^(2(r_(i+1) - r_i))."""
    base = intersection_estimate(i, j, seq, i0)
    return base / GoldenMonomial(0, 2 * (seq.r_at(i + 1) - seq.r_at(i)))


def calibrate_i0(seq: GapSequence, i_max: int = 10, span: int = 4, tolerance: float = 0.10) -> dict:
    """Smallest i where the weight-mass proxy of i(g_i, g_j) / estimate stops moving.

    The proxy is the l1 mass of P_i P_(i+2) ... P_(j-2) v_1, which equals the
    estimate times the mass of R_i ... R_(j-2) v_1. Constants are the ratios
    for j = i+2, ..., i+2*span; they count as stable once all of them are
    within `tolerance` of the limit mass |L v_1|_1.
    """
    from .asymptotics import limit_matrix

    limit_mass = float(sum(limit_matrix().dot(golden_matrix(unit_vector(2).reshape(N, 1))).ravel()))
    table = {}
    found = None
    for i in range(1, i_max + 1):
        ratios = []
        v = golden_matrix(unit_vector(2).reshape(N, 1)).ravel()
        blocks = [normalized_block(i + 2 * l, seq) for l in range(span)]
        for l in range(span):
            w = v
            for b in reversed(blocks[: l + 1]):
                w = b.dot(w)
            ratios.append(float(sum(w)))
        table[i] = ratios
        if found is None and all(abs(r / limit_mass - 1) <= tolerance for r in ratios):
            found = i
    return {"i0": found, "limit_mass": limit_mass, "ratios": table, "tolerance": tolerance}


# asymmetry products


def _asymmetry_terms(curve: Parity, measure: Parity, i: int, i0: int, k: int):
    """Numerator and denominator index lists for each parity pair."""
    if curve is Parity.EVEN and measure is Parity.EVEN:
        num = list(range(2 * i0 + 1, 2 * i, 2)) + list(range(2 * i + 1, 2 * k, 2))
        den = list(range(2 * i0 + 1, 2 * k, 2))
    elif curve is Parity.EVEN and measure is Parity.ODD:
        # i(g_2i, g_2k+1) ~ c_(2i+1) c_(2i+4) c_(2i+6) ... c_2k
        num = list(range(2 * i0 + 1, 2 * i, 2)) + [2 * i + 1] + list(range(2 * i + 4, 2 * k + 1, 2))
        den = list(range(2 * i0 + 2, 2 * k + 1, 2))
    elif curve is Parity.ODD and measure is Parity.EVEN:
        # i(g_2i+1, g_2k) ~ c_(2i+2) c_(2i+5) c_(2i+7) ... c_(2k-1)
        num = list(range(2 * i0 + 2, 2 * i + 1, 2)) + [2 * i + 2] + list(range(2 * i + 5, 2 * k, 2))
        den = list(range(2 * i0 + 1, 2 * k, 2))
    else:
        num = list(range(2 * i0 + 2, 2 * i + 1, 2)) + list(range(2 * i + 2, 2 * k + 1, 2))
        den = list(range(2 * i0 + 2, 2 * k + 1, 2))
    return num, den


def asymmetry_product(curve: Parity, measure: Parity, i: int, seq: GapSequence,
                      i0: int = DEFAULT_I0, k: int | None = None) -> GoldenMonomial:
    """Exact value of the normalized pairing of a gamma with a limit measure.

    The far index k only has to exceed i + 1; the result does not depend on
    it, which the telescoping makes exact.
    """
    if i < i0:
        raise ValueError(f"need i >= i0 = {i0}")
    k = i + 3 if k is None else k
    if k < i + 2:
        raise ValueError("k must be at least i + 2")
    num, den = _asymmetry_terms(curve, measure, i, i0, k)
    return c_product(num, seq) / c_product(den, seq)


def asymmetry_closed_form(curve: Parity, measure: Parity, i: int, seq: GapSequence,
                          i0: int = DEFAULT_I0) -> GoldenMonomial:
    """The simplified telescoped forms, for cross-checking asymmetry_product."""
    if curve is measure:
        return GoldenMonomial(0, 0)
    out = GoldenMonomial(0, 0)
    if curve is Parity.EVEN:
        for l in range(i0, i + 1):
            out = out * c_index(2 * l + 1, seq) / c_index(2 * l + 2, seq)
        return out
    out = GoldenMonomial(0, 0) / c_index(2 * i0 + 1, seq)
    for l in range(i0, i + 1):
        out = out * c_index(2 * l + 2, seq) / c_index(2 * l + 3, seq)
    return out


def asymmetry_bound(i: int, i0: int = DEFAULT_I0) -> GoldenMonomial:
    return GoldenMonomial(0, -2 * (i - i0))


# limit measures


def _iv_matrix(m: np.ndarray, precision_bits: int):
    rows = []
    for row in m:
        out = []
        for x in row:
            s = to_approx(GoldenNumber.coerce(x), precision_bits)
            out.append(iv.mpf([s.lo, s.hi]))
        rows.append(out)
    return iv.matrix(rows)


def _iv_to_approx(x, precision_bits: int) -> ApproxScalar:
    return ApproxScalar.from_iv(x, precision_bits)


def _iv_norm(v) -> object:
    return iv.sqrt(sum((v[k] ** 2 for k in range(v.rows)), iv.mpf(0)))


@dataclass
class MeasureResult:
    parity: Parity
    stages: int
    vector: list  # ApproxScalar entries of the deepest stage
    residuals: list  # ApproxScalar |stage_(n+1) - stage_n| for n = 1..stages-1
    prefactor: str
    precision: int
    stage_vectors: list = field(default_factory=list, repr=False)  # iv column vectors


def limit_measure(parity: Parity, stages: int, seq: GapSequence,
                  precision_bits: int = DEFAULT_PRECISION) -> MeasureResult:
    """Normalized gamma vectors of one parity, propagated in interval arithmetic.

    EVEN stage n is v_2n / (c_1 c_3 ... c_(2n-1)) = (M / c_1) R_2 ... R_(2n-2) v_1.
    ODD stage n is v_(2n+1) / (c_2 c_4 ... c_2n) = R_1 R_3 ... R_(2n-1) v_1,
    so the odd prefactor is exactly 1.
    """
    if stages < 2:
        raise ValueError("need at least 2 stages")
    with interval_precision(precision_bits):
        v1 = iv.matrix([[int(k == 1)] for k in range(N)])
        if parity is Parity.EVEN:
            head = golden_matrix(generator_matrix(Generator.TAFFY_ROT)) * c_value(seq.a_at(1)).inverse()
            prefix = _iv_matrix(head, precision_bits)
            start, prefactor = 2, "M / c_1"
        else:
            prefix = None
            start, prefactor = 1, "1"
        vectors = []
        acc = prefix
        for n in range(1, stages + 1):
            if parity is Parity.EVEN:
                if n > 1:
                    acc = acc * _iv_matrix(normalized_block(start + 2 * (n - 2), seq), precision_bits)
            else:
                block = _iv_matrix(normalized_block(start + 2 * (n - 1), seq), precision_bits)
                acc = block if acc is None else acc * block
            vectors.append(acc * v1)
        residuals = [_iv_to_approx(_iv_norm(b - a), precision_bits) for a, b in zip(vectors, vectors[1:])]
    final = [_iv_to_approx(vectors[-1][k], precision_bits) for k in range(N)]
    return MeasureResult(parity, stages, final, residuals, prefactor, precision_bits, vectors)


def exact_stage(parity: Parity, n: int, seq: GapSequence) -> list:
    """The same stage vector computed exactly from gamma_vector and c products."""
    from .traintrack import gamma_vector

    if parity is Parity.EVEN:
        v, idx = gamma_vector(2 * n, seq), range(1, 2 * n, 2)
    else:
        v, idx = gamma_vector(2 * n + 1, seq), range(2, 2 * n + 1, 2)
    scale = c_product(idx, seq).to_golden().inverse()
    return [GoldenNumber.coerce(x) * scale for x in v]


@dataclass
class MeasurePair:
    even: MeasureResult
    odd: MeasureResult

    @property
    def even_limit(self):
        return self.even.vector

    @property
    def odd_limit(self):
        return self.odd.vector


def measure_pair(stages: int, seq: GapSequence, precision_bits: int = DEFAULT_PRECISION) -> MeasurePair:
    return MeasurePair(limit_measure(Parity.EVEN, stages, seq, precision_bits),
                       limit_measure(Parity.ODD, stages, seq, precision_bits))


def fit_decay_rate(values: Sequence, start: int) -> float:
    """Smallest q with values[n - start] <= q**n for every listed n."""
    q = 0.0
    for offset, v in enumerate(values):
        n = start + offset
        v = float(v)
        if v > 0:
            q = max(q, v ** (1.0 / n))
    return q


# angles


def _angle_bounds(dot_lo, dot_hi, g_lo, g_hi, precision_bits: int) -> ApproxScalar:
    """Angle from atan2(sqrt(G), dot) with G = |u|^2 |v|^2 - (u.v)^2 >= 0.

    atan2(y, x) increases in y and decreases in x for y >= 0, so the
    extremes come from opposite corners.
    """
    with interval_precision(precision_bits):
        y_lo = iv.sqrt(iv.mpf(max(g_lo, mp.zero)))
        y_hi = iv.sqrt(iv.mpf(max(g_hi, mp.zero)))
        lo_iv = iv.atan2(iv.mpf(mp.make_mpf(y_lo._mpi_[0])), iv.mpf(dot_hi))
        hi_iv = iv.atan2(iv.mpf(mp.make_mpf(y_hi._mpi_[1])), iv.mpf(dot_lo))
    lo = mp.make_mpf(lo_iv._mpi_[0])
    hi = mp.make_mpf(hi_iv._mpi_[1])
    if lo < 0:
        lo = mp.zero
    with mp.workprec(precision_bits):
        mid = (lo + hi) / 2
    return ApproxScalar(mid, precision_bits, lo, hi)


def vector_angle(u: Sequence, v: Sequence, precision_bits: int = DEFAULT_PRECISION) -> ApproxScalar:
    """Certified angle between two vectors (exact numbers or ApproxScalars)."""
    exact = all(isinstance(x, (int, Fraction, GoldenNumber)) for x in itertools.chain(u, v))
    if exact:
        uu = sum((GoldenNumber.coerce(x) * x for x in u), GoldenNumber(0))
        vv = sum((GoldenNumber.coerce(x) * x for x in v), GoldenNumber(0))
        uv = sum((GoldenNumber.coerce(x) * y for x, y in zip(u, v)), GoldenNumber(0))
        if uu == 0 or vv == 0:
            raise ValueError("angle with a zero vector")
        g = uu * vv - uv * uv
        if g == 0 and uv > 0:
            zero = mp.zero
            return ApproxScalar(zero, precision_bits, zero, zero)
        dot = to_approx(uv, precision_bits)
        gs = to_approx(g, precision_bits)
        return _angle_bounds(dot.lo, dot.hi, gs.lo, gs.hi, precision_bits)
    with interval_precision(precision_bits):
        ui = [x.to_iv() if isinstance(x, ApproxScalar) else iv.mpf(x) for x in u]
        vi = [x.to_iv() if isinstance(x, ApproxScalar) else iv.mpf(x) for x in v]
        uu = sum((x * x for x in ui), iv.mpf(0))
        vv = sum((x * x for x in vi), iv.mpf(0))
        uv = sum((x * y for x, y in zip(ui, vi)), iv.mpf(0))
        g = uu * vv - uv * uv
    d_lo, d_hi = (mp.make_mpf(t) for t in uv._mpi_)
    g_lo, g_hi = (mp.make_mpf(t) for t in g._mpi_)
    return _angle_bounds(d_lo, d_hi, g_lo, g_hi, precision_bits)


@dataclass
class AngleCertificate:
    angle: ApproxScalar
    tail_error: object  # rigorous-by-extrapolation bound on the angle change still to come
    verdict: str  # "certified" or "inconclusive"
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


RESOLUTION_FACTOR = 2


def residual_resolved(r: ApproxScalar) -> bool:
    return r.lo > 0 and r.hi <= RESOLUTION_FACTOR * r.lo


def _tail_bound(result: MeasureResult):
    """Extrapolated distance from the deepest stage to the limit.

    Uses the last two residual enclosures: with q the upper bound of their
    ratio, the remaining distance is at most r_last * q / (1 - q) as long as
    consecutive ratios keep shrinking, which they do for gap sequences with
    growing gaps. Returns inf when either residual is unresolved, meaning its
    enclosure does not pin it down to within a factor RESOLUTION_FACTOR.
    """
    if len(result.residuals) < 2:
        return mp.inf
    prev, last = result.residuals[-2], result.residuals[-1]
    if not (residual_resolved(prev) and residual_resolved(last)):
        return mp.inf
    with mp.workprec(result.precision):
        q = last.hi / prev.lo
        if q >= 1:
            return mp.inf
        return last.hi * q / (1 - q)


def projective_distinctness(pair: MeasurePair, min_stages: int = 6) -> AngleCertificate:
    """Angle between the even and odd limit directions with a verdict.

    Certified when the lower end of the angle enclosure exceeds the angular
    error allowed by the unresolved tails of both products.
    """
    if min(pair.even.stages, pair.odd.stages) < min_stages:
        raise ValueError(f"need at least {min_stages} stages")
    prec = min(pair.even.precision, pair.odd.precision)
    angle = vector_angle(pair.even.vector, pair.odd.vector, prec)
    with mp.workprec(prec):
        errors = []
        for res in (pair.even, pair.odd):
            tail = _tail_bound(res)
            norm = mp.sqrt(sum(x.lo ** 2 if x.lo > 0 else mp.zero for x in res.vector))
            if tail == mp.inf or norm == 0 or tail >= norm:
                errors.append(mp.inf)
            else:
                errors.append(mp.asin(tail / norm))
        err = errors[0] + errors[1]
    if err == mp.inf:
        return AngleCertificate(angle, err, "inconclusive",
                                "stage residuals are not resolved by their enclosures; raise the precision")
    if angle.lo > err:
        return AngleCertificate(angle, err, "certified")
    return AngleCertificate(angle, err, "inconclusive", "angle enclosure does not clear the tail error")


def odd_block_product(i: int, seq: GapSequence) -> np.ndarray:
    """P_1 P_3 ... P_(2i+1) over the integers."""
    prod = P_block(1, seq)
    for j in range(3, 2 * i + 2, 2):
        prod = prod.dot(P_block(j, seq))
    return prod


def _column(m: np.ndarray, k: int) -> list:
    return [m[r, k - 1] for r in range(N)]


@dataclass
class GroupAngles:
    i: int
    pairwise: dict  # (group, col_a, col_b) -> ApproxScalar
    max_angle: dict  # group -> ApproxScalar


def column_group_angles(i: int, seq: GapSequence, precision_bits: int = DEFAULT_PRECISION) -> GroupAngles:
    """Pairwise column angles inside each group for P_1 P_3 ... P_(2i+1)."""
    if i < 1:
        raise ValueError("i must be at least 1")
    m = odd_block_product(i, seq)
    pairwise, maxima = {}, {}
    for name, group in (("group1", GROUP_ONE), ("group2", GROUP_TWO)):
        best = None
        for a, b in itertools.combinations(group, 2):
            ang = vector_angle(_column(m, a), _column(m, b), precision_bits)
            pairwise[(name, a, b)] = ang
            if best is None or ang.value > best.value:
                best = ang
        maxima[name] = best
    return GroupAngles(i, pairwise, maxima)


def growth_precondition(i: int, seq: GapSequence) -> bool:
    """c_(2i+1) > (c_2 c_4 ... c_2i) / (c_1 c_3 ... c_(2i-1)) * phi^(2i+1), exactly."""
    lhs = c_index(2 * i + 1, seq)
    rhs = c_product(range(2, 2 * i + 1, 2), seq) / c_product(range(1, 2 * i, 2), seq) * GoldenMonomial(0, 2 * i + 1)
    return lhs > rhs


def _normalize_simplex(col: Sequence) -> list:
    total = sum(col)
    return [mp.mpf(x) / total for x in col]


def point_segment_distance(p, a, b):
    """Euclidean distance from p to the segment [a, b]."""
    d = [y - x for x, y in zip(a, b)]
    dd = sum(x * x for x in d)
    if dd == 0:
        t = mp.zero
    else:
        t = sum((x - y) * z for x, y, z in zip(p, a, d)) / dd
        t = min(max(t, mp.zero), mp.one)
    return mp.sqrt(sum((x - (y + t * z)) ** 2 for x, y, z in zip(p, a, d)))


def hausdorff_to_segment(points: Sequence, a, b):
    """Hausdorff distance between conv(points) and a segment lying inside it.

    The segment is contained in the hull, so only the hull-to-segment side
    counts, and the distance to a segment is convex, hence maximal at a vertex.
    """
    return max(point_segment_distance(p, a, b) for p in points)


@dataclass
class ConeReport:
    i: int
    distance: object
    endpoints: tuple


def cone_interval_distance(i: int, seq: GapSequence, precision_bits: int = DEFAULT_PRECISION) -> ConeReport:
    """Hausdorff distance from the normalized image of the orthant to its limit segment.

    The segment joins the normalized column sums of the two groups; both are
    convex combinations of image vertices, so they lie in the image polytope.
    """
    if i < 1:
        raise ValueError("i must be at least 1")
    m = odd_block_product(i, seq)
    with mp.workprec(precision_bits):
        vertices = [_normalize_simplex(_column(m, k)) for k in range(1, N + 1)]
        ends = []
        for group in (GROUP_ONE, GROUP_TWO):
            summed = [sum(m[r, k - 1] for k in group) for r in range(N)]
            ends.append(_normalize_simplex(summed))
        d = hausdorff_to_segment(vertices, ends[0], ends[1])
    return ConeReport(i, d, tuple(ends))
