"""Curves on the seven-punctured sphere in normal coordinates.

The sphere is a heptagon doubled along its boundary. Punctures 1..7 sit at
the heptagon corners in counterclockwise order; the ideal triangulation has
the seven boundary sides plus a fan of four diagonals from puncture 1 in each
of the two copies. Edge indices (internal vertex k is puncture k + 1):

    0..6    boundary side k -> k+1 (mod 7)
    7..10   upper diagonal 0 -> j, j = 2..5
    11..14  lower diagonal 0 -> j, j = 2..5

A curve is its vector of 15 normal coordinates, which is already canonical
on a fixed triangulation. Mapping classes act through curver encodings.
Intersection numbers come from curver; crossing counts and filling reports
come from the independent geodesic arrangement in ``arrangement``.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import curver
import numpy as np
import sympy

from . import arrangement
from .traintrack import N, Generator, GapSequence, generator_matrix, mat_pow

PUNCTURES = 7
ZETA = 15
DEFAULT_POWER_CAP = 16
SUBSURFACE_Y = (7, 1, 2)  # punctures inside the disk whose complement is Y


class CurveError(ValueError):
    """Coordinates that do not describe one essential simple closed curve."""


class TranscriptionError(RuntimeError):
    """A data file line is malformed or fails its checksum."""


class PowerCapExceeded(ValueError):
    pass


class RecarryError(RuntimeError):
    """An image of a carried measure is not carried by the track."""


# the marked sphere


def _edge(k):
    return k


def _upper(j):
    return {1: 0, 6: ~6}.get(j, 5 + j)


def _lower(j):
    return {1: 0, 6: ~6}.get(j, 9 + j)


def _standard_triangles():
    upper = [(_upper(k), _edge(k), ~_upper(k + 1)) for k in range(1, 6)]
    lower = [(_lower(k + 1), ~_edge(k), ~_lower(k)) for k in range(1, 6)]
    return upper + lower


def _standard_ends():
    ends = {k: (k, (k + 1) % 7) for k in range(7)}
    ends.update({5 + j: (0, j) for j in range(2, 6)})
    ends.update({9 + j: (0, j) for j in range(2, 6)})
    return ends


class MarkedSphere:
    """The doubled heptagon with its ideal triangulation and puncture labels."""

    def __init__(self, triangles, ends):
        self.triangles = tuple(tuple(t) for t in triangles)
        self.ends = dict(ends)  # edge index -> (tail, head), internal vertices 0..6
        self.triangulation = curver.kernel.Triangulation.from_tuple(self.triangles)
        self.validate()

    @classmethod
    def standard(cls) -> MarkedSphere:
        return cls(_standard_triangles(), _standard_ends())

    def tail(self, label: int) -> int:
        """Public puncture label at the tail of an oriented edge."""
        u, v = self.ends[label if label >= 0 else ~label]
        return (u if label >= 0 else v) + 1

    def head(self, label: int) -> int:
        return self.tail(~label)

    @property
    def zeta(self) -> int:
        return self.triangulation.zeta

    @property
    def puncture_count(self) -> int:
        return len(self.triangulation.vertices)

    @property
    def euler_characteristic(self) -> int:
        return -self.zeta + len(self.triangles)

    def validate(self):
        if self.zeta != ZETA or len(self.triangles) != 10:
            raise TranscriptionError("expected 15 edges and 10 triangles")
        if self.puncture_count != PUNCTURES or self.euler_characteristic != 2 - PUNCTURES:
            raise TranscriptionError("triangulation is not of the seven-punctured sphere")
        for x, y, z in self.triangles:
            for p, q in ((x, y), (y, z), (z, x)):
                if self.head(p) != self.tail(q):
                    raise TranscriptionError(f"edges {p} and {q} do not meet at a puncture")
        labels = {}
        for vertex in self.triangulation.vertices:
            punctures = {self.tail(int(edge.label)) for edge in vertex}
            if len(punctures) != 1:
                raise TranscriptionError("puncture labels disagree with the vertex links")
            labels[punctures.pop()] = vertex
        if sorted(labels) != list(range(1, PUNCTURES + 1)):
            raise TranscriptionError("punctures are not labelled 1..7")

    def curve_around(self, punctures) -> CurveCode:
        """Boundary of a neighbourhood of consecutive heptagon corners."""
        inside = {p - 1 for p in punctures}
        if not 2 <= len(inside) <= PUNCTURES - 2:
            raise CurveError("a curve must enclose between 2 and 5 punctures")
        coords = [int(len(set(self.ends[e]) & inside) == 1) for e in range(ZETA)]
        return CurveCode(tuple(coords))

    def geodesic_model(self) -> arrangement.GeodesicModel:
        tails = {}
        for e in range(ZETA):
            tails[e] = self.tail(e)
            tails[~e] = self.tail(~e)
        return arrangement.GeodesicModel(self.triangles, tails)


@lru_cache(maxsize=1)
def sphere() -> MarkedSphere:
    return MarkedSphere.standard()


@lru_cache(maxsize=1)
def _model() -> arrangement.GeodesicModel:
    return sphere().geodesic_model()


# transcription data


@dataclass(frozen=True)
class Transcription:
    name: str
    scheme: str
    coords: tuple
    checksum: str


def transcription_checksum(name: str, scheme: str, coords) -> str:
    body = f"{name} {scheme} {','.join(str(int(x)) for x in coords)}"
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def parse_transcriptions(text: str) -> dict:
    """Lines of ``name scheme c1,c2,... checksum``; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise TranscriptionError(f"line {n}: expected 4 fields, got {len(parts)}")
        name, scheme, body, checksum = parts
        try:
            coords = tuple(int(t) for t in body.split(","))
        except ValueError as exc:
            raise TranscriptionError(f"line {n}: bad coordinates {body!r}") from exc
        if transcription_checksum(name, scheme, coords) != checksum:
            raise TranscriptionError(f"line {n}: checksum mismatch for {name}")
        if name in out:
            raise TranscriptionError(f"line {n}: duplicate entry {name}")
        out[name] = Transcription(name, scheme, coords, checksum)
    return out


@lru_cache(maxsize=1)
def transcriptions() -> dict:
    text = resources.files(__package__).joinpath("data/transcriptions.txt").read_text()
    return parse_transcriptions(text)


def _entry(name: str, scheme: str) -> tuple:
    item = transcriptions()[name]
    if item.scheme != scheme:
        raise TranscriptionError(f"{name} has scheme {item.scheme}, expected {scheme}")
    return item.coords


# curves


@dataclass(frozen=True)
class CurveCode:
    """Normal coordinates of an essential, non-peripheral simple closed curve."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(int(x) for x in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != ZETA or min(coords) < 0:
            raise CurveError("expected 15 nonnegative normal coordinates")
        T = sphere().triangulation
        for tri in T:
            w = [coords[int(e.index)] for e in tri]
            if sum(w) % 2 or any(2 * x > sum(w) for x in w):
                raise CurveError("coordinates violate a triangle condition")
        lam = T.lamination(list(coords))
        if not isinstance(lam, curver.kernel.Curve) or lam.is_peripheral():
            raise CurveError("coordinates do not describe an essential simple closed curve")

    @classmethod
    def _trusted(cls, coords) -> CurveCode:
        """Skip validation for images of valid curves under mapping classes."""
        c = object.__new__(cls)
        object.__setattr__(c, "coords", tuple(int(x) for x in coords))
        return c

    def lamination(self, promote: bool = False):
        return sphere().triangulation.lamination(list(self.coords), promote=promote)

    @property
    def weight(self) -> int:
        return sum(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return ZETA


def canonical(c: CurveCode) -> CurveCode:
    return CurveCode(c.coords)


def named_curve(name: str) -> CurveCode:
    return CurveCode(_entry(name, "normal"))


def alpha(i: int) -> CurveCode:
    return named_curve(f"alpha{i}")


def gamma0() -> CurveCode:
    return named_curve("gamma0")


def delta() -> CurveCode:
    return named_curve("delta")


def y_boundary() -> CurveCode:
    """The curve cutting off the four-punctured subsurface Y."""
    return sphere().curve_around(SUBSURFACE_Y)


# mapping classes


class Letter(enum.Enum):
    RHO = "RHO"
    HALF_A = "HALF_A"
    HALF_B = "HALF_B"


def _flip_encoding(T, flips):
    return T.encode([int(e) for e in reversed(flips)])


@lru_cache(maxsize=1)
def _encodings() -> dict:
    T = sphere().triangulation
    flips = _flip_encoding(T, _entry("rho_flips", "flips"))
    src, dst = _entry("rho_isometry", "edgemap")
    rho = flips.target_triangulation.find_isometry(T, {src: dst}).encode() * flips
    half_a = T.edge_arc(_entry("half_a", "edge")[0]).encode_halftwist()
    half_b = T.edge_arc(_entry("half_b", "edge")[0]).encode_halftwist()
    out = {}
    for letter, enc in ((Letter.RHO, rho), (Letter.HALF_A, half_a), (Letter.HALF_B, half_b)):
        out[letter, 1] = enc
        out[letter, -1] = enc.inverse()
    return out


@lru_cache(maxsize=1 << 16)
def _act(letter: Letter, exponent: int, coords: tuple) -> tuple:
    T = sphere().triangulation
    image = _encodings()[letter, exponent](T.lamination(list(coords), promote=False))
    return tuple(int(x) for x in image)


@dataclass(frozen=True)
class MappingClass:
    """A word g = w_1 ∘ w_2 ∘ ... ∘ w_n; the last letter acts first."""

    word: tuple = ()

    def __post_init__(self):
        word = tuple((Letter(l), int(e)) for l, e in self.word)
        if any(e not in (1, -1) for _, e in word):
            raise ValueError("letters carry exponent +1 or -1")
        object.__setattr__(self, "word", word)

    def __mul__(self, other: MappingClass) -> MappingClass:
        return MappingClass(self.word + other.word)

    def inverse(self) -> MappingClass:
        return MappingClass(tuple((l, -e) for l, e in reversed(self.word)))

    def __pow__(self, n: int) -> MappingClass:
        base = self if n >= 0 else self.inverse()
        return MappingClass(base.word * abs(n))

    def __len__(self):
        return len(self.word)

    def __call__(self, c: CurveCode) -> CurveCode:
        return apply(self, c)

    def __str__(self):
        if not self.word:
            return "id"
        return "*".join(l.value + ("^-1" if e < 0 else "") for l, e in self.word)


IDENTITY = MappingClass()
RHO = MappingClass(((Letter.RHO, 1),))
HALF_A = MappingClass(((Letter.HALF_A, 1),))
HALF_B = MappingClass(((Letter.HALF_B, 1),))
TAU = HALF_A.inverse() * HALF_B
TAU_RHO = TAU * RHO


def phi(r: int, cap: int = DEFAULT_POWER_CAP) -> MappingClass:
    """tau^r ∘ rho."""
    if r < 1:
        raise ValueError("phi needs r >= 1")
    if r > cap:
        raise PowerCapExceeded(f"tau^{r} exceeds the kernel cap {cap}")
    return TAU**r * RHO


def Phi(n: int, seq: GapSequence | None = None, cap: int = DEFAULT_POWER_CAP) -> MappingClass:
    """phi_(r_1) ∘ ... ∘ phi_(r_n)."""
    seq = seq or GapSequence.default()
    g = IDENTITY
    for i in range(1, n + 1):
        g = g * phi(seq.r_at(i), cap)
    return g


def apply(g: MappingClass, c: CurveCode) -> CurveCode:
    coords = c.coords
    for letter, e in reversed(g.word):
        coords = _act(letter, e, coords)
    return CurveCode._trusted(coords)


@lru_cache(maxsize=64)
def gamma(n: int, seq: GapSequence | None = None) -> CurveCode:
    """gamma_n = Phi_n(gamma_0)."""
    return apply(Phi(n, seq), gamma0())


@lru_cache(maxsize=64)
def alpha_orbit(n: int, seq: GapSequence | None = None) -> CurveCode:
    """Phi_n(alpha_0)."""
    seq = seq or GapSequence.default()
    return apply(Phi(n, seq), alpha(0))


# intersection and filling


def intersection(c1: CurveCode, c2: CurveCode) -> int:
    """Geometric intersection number, by curver's shortening algorithm."""
    return int(c1.lamination(promote=True).intersection(c2.lamination(promote=True)))


def crossing_number(c1: CurveCode, c2: CurveCode) -> int:
    """Crossings of the two geodesic representatives, counted independently of curver."""
    if c1 == c2:
        return 0
    arr = _model().arrange([c1.coords, c2.coords])
    return arr.crossings.get((0, 1), 0)


@dataclass(frozen=True)
class ComplementComponent:
    punctures: tuple  # public labels
    boundary_components: int

    @property
    def puncture_count(self) -> int:
        return len(self.punctures)

    @property
    def is_disk(self) -> bool:
        return self.boundary_components == 1

    @property
    def admissible(self) -> bool:
        return self.is_disk and self.puncture_count <= 1


@dataclass(frozen=True)
class FillReport:
    fills: bool
    connected: bool
    components: tuple
    crossings: dict  # (a, b) -> crossings, curve positions in the input

    def __bool__(self):
        return self.fills

    @property
    def euler_consistent(self) -> bool:
        """A connected 4-valent graph on the sphere with V vertices has V + 2 faces."""
        return not self.connected or len(self.components) == sum(self.crossings.values()) + 2


def fills(*curves: CurveCode) -> FillReport:
    """Whether the union of the curves in minimal position cuts the sphere into
    disks and once-punctured disks, with the complementary components listed."""
    if len(curves) < 2:
        raise ValueError("fills needs at least two curves")
    unique = list(dict.fromkeys(curves))
    arr = _model().arrange([c.coords for c in unique])
    components = tuple(sorted(
        (ComplementComponent(f.punctures, f.boundary_components) for f in arr.faces),
        key=lambda c: (c.punctures, c.boundary_components)))
    return FillReport(arr.fills, arr.connected, components, dict(arr.crossings))


def fills_by_crushing(first, second) -> bool:
    """curver's filling test for two multicurves, each given as disjoint curves."""
    T = sphere().triangulation
    groups = []
    for group in (first, second):
        group = [group] if isinstance(group, CurveCode) else list(group)
        coords = [sum(c.coords[e] for c in group) for e in range(ZETA)]
        lam = T.lamination(coords)
        if not isinstance(lam, curver.kernel.MultiCurve) or len(list(lam.components())) != len(set(group)):
            raise CurveError("each side must be a set of pairwise disjoint distinct curves")
        groups.append(lam)
    return bool(groups[0].fills_with(groups[1]))


# the train track chart


NOT_CARRIED = None


@dataclass(frozen=True)
class WeightFiber:
    """All nonnegative integral branch weights realising one curve.

    The nine chosen branches are one more than the dimension of measured
    laminations, so weights are determined only up to multiples of
    ``direction``; ``steps`` lists the admissible multiples.
    """

    base: tuple
    direction: tuple
    steps: tuple

    def members(self):
        return [tuple(b + t * d for b, d in zip(self.base, self.direction)) for t in self.steps]

    def __contains__(self, weights) -> bool:
        return tuple(int(x) for x in weights) in set(self.members())

    @property
    def unique(self) -> bool:
        return len(self.steps) == 1


@dataclass(frozen=True)
class TrackChart:
    flips: tuple
    rows: np.ndarray  # 15 x 9 integer matrix: adapted coordinates = rows @ weights

    @classmethod
    def from_transcriptions(cls) -> TrackChart:
        rows = [_entry(f"track_row{e:02d}", "linear") for e in range(ZETA)]
        return cls(_entry("track_flips", "flips"), np.array(rows, dtype=object))

    @property
    def encoding(self):
        return _flip_encoding(sphere().triangulation, self.flips)

    def adapted(self, c: CurveCode) -> tuple:
        return tuple(int(x) for x in self.encoding(c.lamination()))

    def weights_to_adapted(self, w) -> tuple:
        return tuple(int(x) for x in self.rows.dot(np.array([int(x) for x in w], dtype=object)))

    def _solve(self, y):
        """A rational particular solution of rows @ w = y, or None."""
        y = sympy.Matrix([sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in y])
        w = _pinv(self.rows_key) * y
        if sympy.Matrix(self.rows_key) * w != y:
            return None
        return [Fraction(int(x.p), int(x.q)) for x in w]

    @property
    def rows_key(self) -> tuple:
        return tuple(tuple(int(x) for x in r) for r in self.rows)

    @property
    def kernel_direction(self) -> tuple:
        return _kernel_direction(self.rows_key)

    def fiber(self, y) -> WeightFiber | None:
        w = self._solve(y)
        if w is None:
            return None
        d = self.kernel_direction
        pivot = next(k for k, x in enumerate(d) if abs(x) == 1)
        w = [x - w[pivot] * d[pivot] * dx for x, dx in zip(w, d)]  # weight at pivot becomes 0
        if any(x.denominator != 1 for x in w):
            return None
        lo, hi = -math.inf, math.inf
        for x, dx in zip(w, d):
            if dx > 0:
                lo = max(lo, math.ceil(-x / dx))
            elif dx < 0:
                hi = min(hi, math.floor(-x / dx))
        if lo > hi:
            return None
        return WeightFiber(tuple(int(x) for x in w), d, tuple(range(int(lo), int(hi) + 1)))


@lru_cache(maxsize=4)
def _pinv(rows_key):
    return sympy.Matrix(rows_key).pinv()


@lru_cache(maxsize=4)
def _kernel_direction(rows_key):
    basis = sympy.Matrix(rows_key).nullspace()
    if len(basis) != 1:
        raise TranscriptionError("the track chart should have a one-dimensional kernel")
    v = basis[0]
    v = v * sympy.ilcm(*[x.q for x in v])
    v = v / sympy.igcd(*[int(x) for x in v])
    if next(x for x in v if x != 0) < 0:
        v = -v
    return tuple(int(x) for x in v)


@lru_cache(maxsize=1)
def track_chart() -> TrackChart:
    return TrackChart.from_transcriptions()


def weight_fiber(c: CurveCode) -> WeightFiber | None:
    chart = track_chart()
    return chart.fiber(chart.adapted(c))


def carried_weights(c: CurveCode):
    """The nine chosen-branch weights of a carried curve, or NOT_CARRIED.

    Raises ValueError when the curve is carried with several weight vectors;
    use ``weight_fiber`` to see them.
    """
    fiber = weight_fiber(c)
    if fiber is None:
        return NOT_CARRIED
    if not fiber.unique:
        raise ValueError(f"{len(fiber.steps)} weight vectors carry this curve")
    w = np.empty(N, dtype=object)
    w[:] = list(fiber.members()[0])
    return w


def calibrate_track(max_length: int = 6) -> np.ndarray:
    """Refit the chart rows from the orbit of gamma_0 under words in tau and tau∘rho.

    The weights of each orbit curve are the matching products of the two
    generator matrices applied to e_9; the fit is exact least squares.
    """
    chart = track_chart()
    A, M = generator_matrix(Generator.TAFFY), generator_matrix(Generator.TAFFY_ROT)
    V, Y = [], []
    for n in range(max_length + 1):
        for word in itertools.product((0, 1), repeat=n):
            c, v = gamma0(), np.array([0] * 8 + [1], dtype=object)
            for ch in reversed(word):
                c = apply(TAU if ch == 0 else TAU_RHO, c)
                v = (A if ch == 0 else M).dot(v)
            V.append([int(x) for x in v])
            Y.append(chart.adapted(c))
    Vs, Ys = sympy.Matrix(V), sympy.Matrix(Y)
    if Vs.rank() < N:
        raise ValueError("orbit too small to determine the chart; raise max_length")
    K = (Vs.T * Vs).inv() * Vs.T * Ys
    if Vs * K != Ys:
        raise ValueError("adapted coordinates are not linear in the weights")
    return np.array(K.T.tolist(), dtype=object)


# induced action on the nine weights


BASIS_WORD_LENGTH = 7


@lru_cache(maxsize=1)
def _measure_basis():
    """Nine orbit curves with unique weights spanning the weight space."""
    chart = track_chart()
    curves, weights = [], []
    for word in itertools.product((0, 1), repeat=BASIS_WORD_LENGTH):
        c = gamma0()
        for ch in reversed(word):
            c = apply(TAU if ch == 0 else TAU_RHO, c)
        fiber = chart.fiber(chart.adapted(c))
        if fiber is None or not fiber.unique:
            continue
        w = list(fiber.members()[0])
        if sympy.Matrix(weights + [w]).rank() == len(weights) + 1:
            curves.append(c)
            weights.append(w)
        if len(weights) == N:
            return tuple(curves), sympy.Matrix(weights).T
    raise RecarryError("could not find nine independent carried curves")


def induced_matrix(g: MappingClass) -> np.ndarray:
    """Matrix of g on branch weights: push a weight basis through g and recarry.

    Each column is the unique nonnegative integral lift of the image of a
    basis measure.
    """
    chart = track_chart()
    curves, W = _measure_basis()
    images = sympy.Matrix([list(chart.adapted(apply(g, c))) for c in curves]).T
    normal = images * W.inv()
    out = np.empty((N, N), dtype=object)
    for k in range(N):
        fiber = chart.fiber([Fraction(int(x.p), int(x.q)) for x in normal[:, k]])
        if fiber is None or not fiber.unique:
            raise RecarryError(f"basis measure e_{k + 1} is not recarried uniquely under {g}")
        out[:, k] = list(fiber.members()[0])
    return out


@dataclass(frozen=True)
class GeneratorReport:
    tau: np.ndarray
    tau_rho: np.ndarray
    verdict: str
    composites: dict  # r -> induced matrix equals A^(r-1) M

    @property
    def matches(self) -> bool:
        return self.verdict == "tau -> A, tau∘rho -> M" and all(self.composites.values())


def reproduce_generator_matrices(r_values=(1, 2, 3)) -> GeneratorReport:
    A, M = generator_matrix(Generator.TAFFY), generator_matrix(Generator.TAFFY_ROT)
    induced_tau = induced_matrix(TAU)
    induced_tr = induced_matrix(TAU_RHO)

    def same(x, y):
        return bool((x == y).all())

    if same(induced_tau, A) and same(induced_tr, M):
        verdict = "tau -> A, tau∘rho -> M"
    elif same(induced_tau, M) and same(induced_tr, A):
        verdict = "tau -> M, tau∘rho -> A"
    else:
        verdict = "no match"
    composites = {r: same(induced_matrix(phi(r)), mat_pow(A, r - 1).dot(M)) for r in r_values}
    return GeneratorReport(induced_tau, induced_tr, verdict, composites)
