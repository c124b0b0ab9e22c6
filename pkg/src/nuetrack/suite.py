"""The acceptance suite and the report tables behind the command line.

Each criterion is a list of checks. A check either holds, fails, or is
inconclusive (an enclosure straddles its threshold). Checks recorded as known
deviations are expected to fail; if one holds instead, the criterion fails,
so a deviation that stops reproducing is noticed.
"""

from __future__ import annotations

import itertools
import warnings
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable

from mpmath import mp

from . import asymptotics as asy
from . import curves as cv
from . import ergodicity as erg
from .exactnum import DEFAULT_PRECISION, GoldenNumber, fibonacci, to_approx
from .traintrack import GapSequence, P_block, block_P, gamma_vector, top_eigenvalue, unit_vector

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool | None  # None: inconclusive
    detail: str = ""
    deviation: str = ""  # non-empty: expected to fail, with the reason

    @property
    def status(self) -> str:
        if self.deviation:
            return "XFAIL" if self.ok is False else "XPASS"
        return {True: PASS, False: FAIL, None: INCONCLUSIVE}[self.ok]


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)

    @property
    def status(self) -> str:
        states = [c.status for c in self.checks]
        if FAIL in states or "XPASS" in states:
            return FAIL
        if INCONCLUSIVE in states:
            return INCONCLUSIVE
        return PASS

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "status": self.status,
            "checks": [{"name": c.name, "status": c.status, "detail": c.detail,
                        **({"deviation": c.deviation} if c.deviation else {})} for c in self.checks],
        }


def fmt(x, digits: int = 15) -> str:
    """Deterministic decimal rendering of an mpf, float or ApproxScalar."""
    x = getattr(x, "value", x)
    return mp.nstr(mp.mpf(x), digits) if x is not None else ""


def _golden_vector(v):
    return [GoldenNumber.coerce(x) for x in v]


# criteria


def criterion_exact_anchors(seq: GapSequence, precision: int = DEFAULT_PRECISION) -> CriterionResult:
    res = CriterionResult(1, "exact anchors")
    e9, e2 = unit_vector(9), unit_vector(2)
    res.checks.append(Check("v_0 = e_9", list(gamma_vector(0, seq)) == list(e9)))
    res.checks.append(Check("v_1 = e_2", list(gamma_vector(1, seq)) == list(e2)))
    L = asy.limit_matrix()
    res.checks.append(Check("rank L = 1", asy.matrix_rank(L) == 1))
    res.checks.append(Check("trace L = 1", asy.trace(L) == 1))
    # rank one, so the only nonzero eigenvalue is the trace; check L^2 = L exactly as well
    res.checks.append(Check("top eigenvalue of L = 1", bool((L.dot(L) == L).all()) and asy.trace(L) == 1))
    Lv = _golden_vector(L.dot(e2))
    want = [GoldenNumber(0), GoldenNumber(Fraction(1, 2)), GoldenNumber(Fraction(-1, 4), Fraction(1, 4))] + [GoldenNumber(0)] * 6
    res.checks.append(Check("L v_1 = (0, 1/2, (-1+sqrt5)/4, 0, ...)", Lv == want, str([str(x) for x in Lv[:3]])))
    return res


def criterion_hat_approximation(seq: GapSequence, precision: int = DEFAULT_PRECISION,
                                a_max: int = 25, bound: int = 10) -> CriterionResult:
    res = CriterionResult(2, "leading-order model of P(a, a')")
    worst, where = None, None
    for a, b in itertools.combinations(range(1, a_max + 1), 2):
        d = asy.frobenius_norm(block_P(a, b) - asy.hat_block(a, b), precision)
        if worst is None or d.hi > worst.hi:
            worst, where = d, (a, b)
    ok = True if worst.hi < bound else (False if worst.lo >= bound else None)
    res.checks.append(Check(f"max |P - P_hat|_F < {bound} over 1 <= a < a' <= {a_max}", ok,
                            f"max {fmt(worst.hi, 10)} at {where}"))
    return res


def fibonacci_deviations(seq: GapSequence, i_values, precision: int = DEFAULT_PRECISION) -> list:
    out = []
    for i in i_values:
        lam = top_eigenvalue(P_block(i, seq), precision)
        target = 2 * fibonacci(2 * seq.a_at(i + 1))
        with mp.workprec(precision):
            out.append((i, abs(lam.value / target - 1)))
    return out


def criterion_fibonacci(seq: GapSequence, precision: int = DEFAULT_PRECISION,
                        i_values=range(3, 11), tolerance: float = 0.05) -> CriterionResult:
    res = CriterionResult(3, "top eigenvalue near twice a Fibonacci number")
    devs = fibonacci_deviations(seq, i_values, precision)
    res.checks.append(Check(f"deviation <= {tolerance}", all(d <= tolerance for _, d in devs),
                            " ".join(f"{i}:{fmt(d, 4)}" for i, d in devs)))
    res.checks.append(Check("deviation strictly decreasing in the gap",
                            all(b < a for (_, a), (_, b) in zip(devs, devs[1:]))))
    return res


def criterion_products(seq: GapSequence, precision: int = DEFAULT_PRECISION,
                       i_values=range(2, 9), k_values=range(0, 7),
                       enlarged=(range(2, 11), range(0, 9)), stability: float = 0.25) -> CriterionResult:
    res = CriterionResult(4, "products of normalized blocks")
    rows = asy.residual_grid(seq, i_values, k_values, precision)
    fit = asy.fit_constants(rows)
    big = asy.fit_constants(asy.residual_grid(seq, *enlarged, precision))
    with mp.workprec(precision):
        res.checks.append(Check("residual <= C (e^sum - 1)",
                                all(r.residual.value <= fit.C * r.bound.value for r in rows),
                                f"C = {fmt(fit.C, 8)}"))
        res.checks.append(Check("first-order residual <= C' (e^sum - 1) for k >= 1",
                                all(r.first_order_residual.value <= fit.C_prime * r.first_order_bound.value
                                    for r in rows if r.k > 0), f"C' = {fmt(fit.C_prime, 8)}"))
        drift_c = abs(big.C / fit.C - 1)
        drift_cp = abs(big.C_prime / fit.C_prime - 1)
        res.checks.append(Check(f"constants stable to {stability:.0%} on the enlarged grid",
                                drift_c <= stability and drift_cp <= stability,
                                f"C drift {fmt(drift_c, 4)}, C' drift {fmt(drift_cp, 4)}"))
        res.checks.append(Check("product norms bounded below", fit.floor > 0, f"floor {fmt(fit.floor, 8)}"))
        zero_k = [r for r in rows if r.k == 0]
        res.checks.append(Check(
            "first-order residual bounded at k = 0",
            all(r.first_order_residual.value <= fit.C_prime * r.first_order_bound.value for r in zero_k),
            f"max residual {fmt(max(r.first_order_residual.value for r in zero_k), 6)} against a zero bound",
            deviation="the bound e^0 - 1 vanishes while R_i - L - eps_i L = eps_i (I - L) does not"))
    return res


def criterion_telescoping(seq: GapSequence, precision: int = DEFAULT_PRECISION,
                          i0: int = erg.DEFAULT_I0, span: int = 6) -> CriterionResult:
    res = CriterionResult(5, "telescoping asymmetry products")
    P = erg.Parity
    matched, mixed = True, {}
    for i in range(i0, i0 + span + 1):
        for c, m in itertools.product(P, P):
            value = erg.asymmetry_product(c, m, i, seq, i0)
            if value != erg.asymmetry_closed_form(c, m, i, seq, i0):
                matched = False
            if c is m:
                matched &= value.is_one()
            else:
                mixed.setdefault((c, m), []).append((i, value))
    res.checks.append(Check("matched parity products equal 1", matched))
    for (c, m), values in mixed.items():
        label = f"{c.name.lower()} curve, {m.name.lower()} measure"
        res.checks.append(Check(f"{label}: below phi^(-2(i - i0))",
                                all(v < erg.asymmetry_bound(i, i0) for i, v in values),
                                " ".join(str(v) for _, v in values)))
        res.checks.append(Check(f"{label}: strictly decreasing",
                                all(b < a for (_, a), (_, b) in zip(values, values[1:]))))
    return res


def criterion_distinctness(seq: GapSequence, precision: int = DEFAULT_PRECISION, stages: int = 8) -> CriterionResult:
    res = CriterionResult(6, "projectively distinct limit measures")
    cert = erg.projective_distinctness(erg.measure_pair(stages, seq, precision))
    ok = True if cert.certified else None
    res.checks.append(Check(f"angle lower bound > 0 at {precision} bits, {stages} stages", ok,
                            f"angle in [{fmt(cert.angle.lo, 10)}, {fmt(cert.angle.hi, 10)}], "
                            f"tail {fmt(cert.tail_error, 6)}; {cert.verdict} {cert.reason}".strip()))
    return res


def angle_table(seq: GapSequence, i_values, precision: int = DEFAULT_PRECISION) -> list:
    """(i, group, max angle) for P_1 P_3 ... P_(2i+1)."""
    rows = []
    for i in i_values:
        ga = erg.column_group_angles(i, seq, precision)
        for name in ("group1", "group2"):
            rows.append((i, name, ga.max_angle[name]))
    return rows


def criterion_small_angles(seq: GapSequence, precision: int = DEFAULT_PRECISION,
                           i_values=range(2, 9)) -> CriterionResult:
    res = CriterionResult(7, "shrinking angles inside each column group")
    rows = angle_table(seq, range(i_values.start, i_values.stop + 1), precision)
    q = {}
    with mp.workprec(precision):
        for name in ("group1", "group2"):
            seqv = [a for _, g, a in rows if g == name]
            q[name] = max(b.hi / a.lo for a, b in zip(seqv, seqv[1:]))
    res.checks.append(Check("fitted contraction q < 1 for both groups", all(v < 1 for v in q.values()),
                            ", ".join(f"{k} q = {fmt(v, 6)}" for k, v in q.items())))
    res.checks.append(Check("growth precondition holds exactly",
                            all(erg.growth_precondition(i, seq) for i in i_values)))
    return res


def criterion_cone(seq: GapSequence, precision: int = DEFAULT_PRECISION, i_values=range(2, 8)) -> CriterionResult:
    res = CriterionResult(8, "cone collapse onto a segment")
    d = [erg.cone_interval_distance(i, seq, precision).distance for i in i_values]
    q = erg.fit_decay_rate(d, i_values.start)
    res.checks.append(Check("Hausdorff distance strictly decreasing", all(b < a for a, b in zip(d, d[1:])),
                            " ".join(fmt(x, 6) for x in d)))
    res.checks.append(Check("distance <= q^i with fitted q < 1", q < 1, f"q = {q:.6f}"))
    return res


def intersection_table(seq: GapSequence, n_max: int = 6) -> list:
    """(i, j, kernel intersection, estimate, ratio) for parity-aligned pairs."""
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", erg.EstimateRangeWarning)
        for i in range(n_max + 1):
            for j in range(i + 2, n_max + 1, 2):
                k = cv.intersection(cv.gamma(i, seq), cv.gamma(j, seq))
                est = erg.intersection_estimate(i, j, seq)
                with mp.workprec(128):
                    ratio = mp.mpf(k) / to_approx(est.to_golden(), 128).value
                rows.append((i, j, k, est, ratio))
    return rows


def band_constant(ratios) -> object:
    return max(max(r, 1 / r) for r in ratios)


def criterion_cross_validation(seq: GapSequence, precision: int = DEFAULT_PRECISION,
                               n_max: int = 4, pair_max: int = 6) -> CriterionResult:
    res = CriterionResult(9, "curve kernel against the matrices")
    report = cv.reproduce_generator_matrices()
    res.checks.append(Check("induced matrices are exactly A and M with a verdict", report.matches,
                            f"{report.verdict}; composites {report.composites}"))
    carried = []
    for n in range(n_max + 1):
        w = cv.carried_weights(cv.gamma(n, seq))
        carried.append(w is not None and list(w) == list(gamma_vector(n, seq)))
    res.checks.append(Check(f"carried_weights(gamma_n) = v_n for n <= {n_max}", all(carried), str(carried)))
    rows = intersection_table(seq, pair_max)
    fit = [r for _, j, _, _, r in rows if j < pair_max]
    held = [r for _, j, _, _, r in rows if j == pair_max]
    C = band_constant(fit)
    res.checks.append(Check("intersections within one multiplicative band of the estimate",
                            all(1 / C <= r <= C for r in held) and all(r > 0 for _, _, _, _, r in rows),
                            f"C = {fmt(C, 8)} fitted on j < {pair_max}, "
                            f"held-out ratios {' '.join(fmt(r, 6) for r in held)}"))
    return res


def criterion_combinatorics(seq: GapSequence, precision: int = DEFAULT_PRECISION) -> CriterionResult:
    res = CriterionResult(10, "combinatorial facts about the curves")
    a = [cv.alpha_orbit(i, seq) for i in range(7)]
    res.checks.append(Check("i(alpha_0, alpha_1) = 0", cv.intersection(a[0], a[1]) == 0))
    values = [cv.intersection(a[j - 1], a[j + 2]) for j in range(1, 5)]
    res.checks.append(Check("i(alpha_(j-1), alpha_(j+2)) = 2 for j = 1..4", values == [2] * 4, str(values)))
    f = cv.fills(a[0], a[5])
    res.checks.append(Check("alpha_0 and alpha_5 fill", f.fills and f.euler_consistent,
                            f"{len(f.components)} complementary components"))
    g = [cv.gamma(n, seq) for n in range(5)]
    five, four = cv.fills(*g[0:5]), cv.fills(*g[0:4])
    res.checks.append(Check("gamma_0..gamma_4 fill and gamma_0..gamma_3 do not",
                            five.fills and not four.fills))
    later = cv.fills(*g[1:5]).fills
    res.checks.append(Check("no four consecutive gammas fill", not later, f"gamma_1..gamma_4 fills: {later}",
                            deviation="four consecutive curves starting at gamma_1 or later already fill"))
    corpus = [cv.alpha(i) for i in range(6)] + [cv.gamma0(), cv.delta()] + g[1:4]
    res.checks.append(Check("rho^7 = id on the corpus", all(cv.apply(cv.RHO**7, c) == c for c in corpus)))
    res.checks.append(Check("tau fixes alpha_1", cv.apply(cv.TAU, a[1]) == a[1]))
    res.checks.append(Check("tau fixes alpha_0", cv.apply(cv.TAU, a[0]) == a[0],
                            f"i(alpha_0, tau alpha_0) = {cv.intersection(a[0], cv.apply(cv.TAU, a[0]))}",
                            deviation="alpha_0 meets the support of tau; only alpha_1..alpha_3 are fixed"))
    return res


CRITERIA: dict[int, Callable] = {
    1: criterion_exact_anchors,
    2: criterion_hat_approximation,
    3: criterion_fibonacci,
    4: criterion_products,
    5: criterion_telescoping,
    6: criterion_distinctness,
    7: criterion_small_angles,
    8: criterion_cone,
    9: criterion_cross_validation,
    10: criterion_combinatorics,
}


def run_suite(seq: GapSequence | None = None, precision: int = DEFAULT_PRECISION, only=None) -> list:
    seq = seq or GapSequence.default()
    return [CRITERIA[n](seq, precision) for n in sorted(CRITERIA) if only is None or n in only]


# tables


RESIDUAL_HEADER = ("i", "k", "residual", "bound", "ratio", "phi_exponent")


def residual_table(seq: GapSequence, i_max: int, k_max: int, precision: int = DEFAULT_PRECISION) -> list:
    rows = []
    for r in asy.residual_grid(seq, range(2, i_max + 1), range(0, k_max + 1), precision):
        with mp.workprec(precision):
            ratio = r.residual.value / r.bound.value
        rows.append((r.i, r.k, fmt(r.residual), fmt(r.bound), fmt(ratio), r.phi_exponent))
    return rows


def asymmetry_table(seq: GapSequence, i_max: int, i0: int = erg.DEFAULT_I0) -> list:
    rows = []
    for i in range(i0, max(i_max, i0) + 1):
        for c, m in itertools.product(erg.Parity, erg.Parity):
            v = erg.asymmetry_product(c, m, i, seq, i0)
            value = "1" if v.is_one() else fmt(to_approx(v.to_golden(), 128))
            rows.append((i, c.name.lower(), m.name.lower(), value, str(v), str(erg.asymmetry_bound(i, i0))))
    return rows
