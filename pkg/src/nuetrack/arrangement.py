"""Minimal-position arrangements of curves drawn as hyperbolic geodesics.

The ideal triangulation is given a complete hyperbolic metric by generic
shear coordinates. Closed geodesics meet minimally and form no bigons, so
the crossing count of two of them is their geometric intersection number
and the regions cut out by a family of them are the complementary regions
of that family in minimal position.

Frames: for an oriented edge x the frame F_x puts x on the imaginary axis
running from infinity to 0, with the triangle on its left spanned by
(infinity, 0, 1). A strand crossing x into that triangle is the geodesic
from x1 < 0 to x2 > 0 and crosses x at height sqrt(-x1 * x2).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import sympy
from mpmath import mp, mpf

_TO_NEXT = ((1, -1), (1, 0))  # z -> (z - 1)/z, frame of x to frame of the next edge
_TO_PREV = ((0, -1), (1, -1))  # z -> -1/(z - 1), frame of x to frame of the previous edge


class ArrangementError(RuntimeError):
    """Raised when a trace or a height comparison cannot be resolved."""


def _index(label: int) -> int:
    return label if label >= 0 else ~label


def _mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _mobius(m, z):
    return (m[0][0] * z + m[0][1]) / (m[1][0] * z + m[1][1])


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry, key=repr)] = min(rx, ry, key=repr)


@dataclass(frozen=True)
class Face:
    punctures: tuple
    boundary_components: int
    interior: bool = False  # meets no edge of the triangulation

    @property
    def is_disk(self) -> bool:
        return self.boundary_components == 1

    @property
    def admissible(self) -> bool:
        return self.is_disk and len(self.punctures) <= 1


@dataclass(frozen=True)
class Arrangement:
    faces: tuple
    crossings: dict  # (a, b) -> number of crossings of curve a with curve b
    connected: bool

    @property
    def fills(self) -> bool:
        return self.connected and all(f.admissible for f in self.faces)

    @property
    def vertex_count(self) -> int:
        return sum(self.crossings.values())


class GeodesicModel:
    """An ideal triangulation of a punctured sphere with a generic complete metric."""

    def __init__(self, triangles, tails, precision_bits: int = 128):
        self.triangles = tuple(tuple(t) for t in triangles)
        self.zeta = len(self.triangles) * 3 // 2
        self.tails = dict(tails)  # label -> puncture at its tail
        self.next = {}
        self.prev = {}
        self.triangle_of = {}
        for n, (x, y, z) in enumerate(self.triangles):
            self.next.update({x: y, y: z, z: x})
            self.prev.update({x: z, y: x, z: y})
            self.triangle_of.update({x: n, y: n, z: n})
        self.base_bits = precision_bits
        self._shear_basis = self._completeness_kernel()

    def _completeness_kernel(self):
        punctures = sorted(set(self.tails.values()))
        rows = []
        for p in punctures:
            row = [0] * self.zeta
            for label, tail in self.tails.items():
                if tail == p:
                    row[_index(label)] += 1
            rows.append(row)
        return sympy.Matrix(rows).nullspace()

    def shears(self):
        """Generic shears with zero sum around every cusp."""
        s = [mpf(0)] * self.zeta
        primes = sympy.primerange(2, 10_000)
        for vector, p in zip(self._shear_basis, primes):
            c = mp.sqrt(p) / 10 - mp.floor(mp.sqrt(p) / 10) - mpf("0.5")
            for k in range(self.zeta):
                s[k] += c * mpf(vector[k].p) / vector[k].q
        return s

    # normal curve tracing

    def trace(self, weights):
        """Cyclic list of (entering label, position from its tail, exit label)."""
        w = list(weights)
        total = sum(w)
        start = next((k for k in range(self.zeta) if w[k] > 0), None)
        if start is None:
            raise ArrangementError("empty curve")
        state = (start, 0)
        steps = []
        while True:
            x, k = state
            y, z = self.next[x], self.prev[x]
            wx, wy, wz = w[_index(x)], w[_index(y)], w[_index(z)]
            back = (wz + wx - wy) // 2  # strands turning round the tail of x
            if k < back:
                out, pos = z, wz - 1 - k
            else:
                out, pos = y, wx - 1 - k
            steps.append((x, k, out))
            state = (~out, w[_index(out)] - 1 - pos)
            if state == (start, 0):
                break
            if len(steps) > total:
                raise ArrangementError("trace does not close")
        if len(steps) != total:
            raise ArrangementError("weights describe more than one component")
        return steps

    def heights(self, steps, shear):
        """Crossing height of the geodesic at every step, in the frame of the positive label.

        Runs at the caller's working precision.
        """
        mats = []
        for x, _, out in steps:
            turn = _TO_NEXT if out == self.next[x] else _TO_PREV
            s = mp.exp(shear[_index(out)])
            mats.append(_mul(((mpf(0), -s), (mpf(1), mpf(0))), turn))
        mono = ((mpf(1), mpf(0)), (mpf(0), mpf(1)))
        for m in mats:
            mono = _mul(m, mono)
        (a, b), (c, d) = mono
        disc = (d - a) ** 2 + 4 * b * c
        if c == 0 or disc <= 0:
            raise ArrangementError("monodromy is not hyperbolic")
        r = mp.sqrt(disc)
        x1, x2 = sorted(((a - d - r) / (2 * c), (a - d + r) / (2 * c)))
        if not x1 < 0 < x2:
            raise ArrangementError("geodesic misses its starting edge")
        out = []
        for (x, _, exit_label), m in zip(steps, mats):
            if (x2 < 1) != (exit_label == self.next[x]):
                raise ArrangementError("geodesic and normal curve disagree")
            h = mp.sqrt(-x1 * x2)
            if x < 0:
                h = mp.exp(shear[_index(x)]) / h
            out.append(h)
            x1, x2 = sorted((_mobius(m, x1), _mobius(m, x2)))
        return out

    def _all_heights(self, traces, bits):
        with mp.workprec(bits):
            shear = self.shears()
            return [self.heights(steps, shear) for steps in traces]

    def _order_points(self, curves, traces):
        """Sort strand crossings on every edge, raising precision until no two are confused."""
        bits = self.base_bits + 8 * max(len(t) for t in traces)
        for _ in range(4):
            coarse = self._all_heights(traces, bits)
            fine = self._all_heights(traces, bits + 64)
            with mp.workprec(bits + 64):
                points = defaultdict(list)  # edge index -> [(height, error, curve, step)]
                for ci, steps in enumerate(traces):
                    for si, (h, h0) in enumerate(zip(fine[ci], coarse[ci])):
                        err = 4 * abs(h - h0) + abs(h) * mpf(2) ** (-bits)
                        points[_index(steps[si][0])].append((h, err, ci, si))
                resolved = True
                for pts in points.values():
                    pts.sort(key=lambda t: -t[0])
                    if any(a[0] - b[0] <= a[1] + b[1] for a, b in zip(pts, pts[1:])):
                        resolved = False
                        break
            if resolved:
                break
            bits *= 2
        else:
            raise ArrangementError("two strands cross an edge at the same point")
        slot = {}  # (curve, step) -> position from the tail of the positive label
        count = defaultdict(int)
        for e, pts in points.items():
            for m, (_, _, ci, si) in enumerate(pts):
                slot[ci, si] = m
            count[e] = len(pts)
        for ci, steps in enumerate(traces):  # each geodesic keeps its own normal order
            own = defaultdict(list)
            for si, (x, k, _) in enumerate(steps):
                size = curves[ci][_index(x)]
                own[_index(x)].append((slot[ci, si], k if x >= 0 else size - 1 - k))
            for pairs in own.values():
                pairs.sort()
                if [k for _, k in pairs] != list(range(len(pairs))):
                    raise ArrangementError("geodesic order contradicts the normal curve")
        return slot, count

    # arrangement

    def arrange(self, curves) -> Arrangement:
        curves = [list(c) for c in curves]
        with mp.workprec(self.base_bits):
            return self._arrange(curves)

    def _arrange(self, curves) -> Arrangement:
        traces = [self.trace(c) for c in curves]
        slot, count = self._order_points(curves, traces)

        def local(label, m):
            return m if label >= 0 else count[_index(label)] - 1 - m

        chords_by_triangle = defaultdict(list)
        for ci, steps in enumerate(traces):
            n = len(steps)
            for si, (x, _, out) in enumerate(steps):
                nxt = steps[(si + 1) % n][0]
                assert nxt == ~out
                a = (x, local(x, slot[ci, si]))
                b = (out, count[_index(out)] - 1 - local(~out, slot[ci, (si + 1) % n]))
                chords_by_triangle[self.triangle_of[x]].append((a, b, ci))

        uf = _UnionFind()
        region_cusps = defaultdict(set)
        region_curves = defaultdict(set)
        crossings = defaultdict(int)
        curve_uf = _UnionFind()
        for ci in range(len(curves)):
            curve_uf.find(ci)
        interior = []

        for t, tri in enumerate(self.triangles):
            tokens = []  # cyclic boundary: ("gap", edge, m) | ("cusp", p) | ("point", label, pos)
            order = {}
            for label in tri:
                tokens.append(("cusp", self.tails[label]))
                size = count[_index(label)]
                for pos in range(size):
                    tokens.append(("gap", _index(label), pos if label >= 0 else size - pos))
                    order[label, pos] = len(tokens)
                    tokens.append(("point", label, pos))
                tokens.append(("gap", _index(label), size if label >= 0 else 0))
            point_index = {}
            point_tokens = [i for i, tok in enumerate(tokens) if tok[0] == "point"]
            for rank, i in enumerate(point_tokens):
                point_index[i] = rank
            chords = []
            for a, b, ci in chords_by_triangle.get(t, []):
                p, q = sorted((point_index[order[a]], point_index[order[b]]))
                chords.append((p, q, ci))
            npts = len(point_tokens)
            if npts == 0:
                root = ("region", t)
                for tok in tokens:
                    if tok[0] == "gap":
                        uf.union(root, tok[1:])
                    else:
                        region_cusps[root].add(tok[1])
                continue
            crossing_total = 0
            for i in range(len(chords)):
                p1, q1, c1 = chords[i]
                for j in range(i + 1, len(chords)):
                    p2, q2, c2 = chords[j]
                    if (p1 < p2 < q1) != (p1 < q2 < q1):
                        crossing_total += 1
                        crossings[min(c1, c2), max(c1, c2)] += 1
                        curve_uf.union(c1, c2)
            chord_at = {}
            for n, (p, q, ci) in enumerate(chords):
                chord_at[p] = (n, ci)
                chord_at[q] = (n, ci)
            # boundary gap g sits between points g and g+1 (cyclically); its side of
            # chord (p, q) is recorded by whether p <= g < q
            start = point_tokens[0]
            gaps = [[] for _ in range(npts)]
            rank = 0
            for off in range(1, len(tokens)):
                i = (start + off) % len(tokens)
                if tokens[i][0] == "point":
                    rank = point_index[i]
                else:
                    gaps[rank].append(tokens[i])
            sides = []
            mask = 0
            for g in range(npts):
                n, _ = chord_at[g]
                mask ^= 1 << n
                sides.append(mask)
            regions = {}
            for g in range(npts):
                key = (t, sides[g])
                regions.setdefault(key, []).append(g)
            for key, members in regions.items():
                root = ("region",) + key
                uf.find(root)
                for g in members:
                    for tok in gaps[g]:
                        if tok[0] == "gap":
                            uf.union(root, tok[1:])
                        else:
                            region_cusps[root].add(tok[1])
                    region_curves[root].add(chord_at[g][1])
                    region_curves[root].add(chord_at[(g + 1) % npts][1])
            faces_here = 1 + len(chords) + crossing_total
            for _ in range(faces_here - len(regions)):
                interior.append(t)

        cusps = defaultdict(set)
        adjacent = defaultdict(set)
        for node in list(uf.parent):
            if node[0] == "region":
                root = uf.find(node)
                cusps[root] |= region_cusps[node]
                adjacent[root] |= region_curves[node]
        faces = []
        for root in sorted(cusps.keys() | adjacent.keys(), key=repr):
            comps = {curve_uf.find(c) for c in adjacent[root]}
            faces.append(Face(tuple(sorted(cusps[root])), max(len(comps), 1)))
        faces.extend(Face((), 1, interior=True) for _ in interior)
        roots = {curve_uf.find(c) for c in range(len(curves))}
        return Arrangement(tuple(faces), dict(crossings), len(roots) == 1)


def expected_face_count(arrangement: Arrangement) -> int:
    """Faces of a connected 4-valent graph on the sphere: V - E + F = 2 with E = 2V."""
    return arrangement.vertex_count + 2

