"""Approximate two-point path fields and the Cantor-scheme contraction.

``PathField`` is the extension of a nearest-point seed over
``X x X x [0,1]`` where ``X`` is the union of lattice boxes (side
``delta/2``) meeting ``A``.  Points off the depth grid are evaluated at
the grid point below them inside the same coarse box; all three distance
bounds hold there because they only use the b-hull of that coarse box's
vertex images.

The contraction interleaves path fields of shrinking ``delta`` over the
middle-thirds intervals: the gap ``[s, s']`` of level ``k`` is filled by
``g_{delta_k}`` run between the already defined values at ``s - 3**-k``
and ``s' + 3**-k``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .dyadic import Dyadic, to_text
from .extension import ExtensionField, LatticeSample
from .geometry import (
    Lattice,
    SpanComplex,
    as_point,
    box,
    cheb,
    contains,
    hull_distance,
    nearest_point,
)


class PreconditionError(ValueError):
    pass


@dataclass
class GDeltaAudit:
    samples: int = 0
    max_start_gap: Fraction = Fraction(0)
    max_end_gap: Fraction = Fraction(0)
    max_hull_gap: Fraction = Fraction(0)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "max_start_gap": to_text(self.max_start_gap),
            "max_end_gap": to_text(self.max_end_gap),
            "max_hull_gap": to_text(self.max_hull_gap),
            "violations": self.violations,
        }


def coarse_lattice(A: SpanComplex, delta) -> Lattice:
    return Lattice.cubic(A.dim, Dyadic.of(delta).half())


def seed_boundary(A: SpanComplex, delta) -> LatticeSample:
    """Nearest-point seed on ``Gamma x Gamma x Z``: ``t=0`` follows ``x``, ``t=1`` follows ``y``."""
    if A.is_empty:
        raise PreconditionError("empty complex")
    if not A.is_closed:
        raise PreconditionError("path fields need a closed complex")
    delta = Dyadic.of(delta)
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    n = A.dim
    gamma = coarse_lattice(A, delta)
    lat = Lattice(gamma.steps + gamma.steps + (Dyadic(1),))

    @lru_cache(maxsize=None)
    def near(p):
        return nearest_point(A, p)

    def seed(p):
        t = p[-1]
        if t == 0:
            return near(p[:n])
        if t == 1:
            return near(p[n : 2 * n])
        raise PreconditionError(f"seed requested off t in {{0,1}}: {p}")

    return LatticeSample(lat, seed)


class PathField:
    """Sampled ``g_delta`` for a closed monovex complex."""

    def __init__(self, A: SpanComplex, delta, depth: int):
        self.A = A
        self.delta = Dyadic.of(delta)
        self.depth = depth
        self.seed = seed_boundary(A, self.delta)
        self.gamma = coarse_lattice(A, self.delta)
        self.field = ExtensionField(self.seed, A, depth)
        self.fine = self.delta.half().shift(-depth)

    def _snap(self, v, step) -> Dyadic:
        return step * math.floor(Fraction(v) / Fraction(step))

    def snapped(self, x, y, t) -> tuple:
        for p in (x, y):
            # the coarse box below p must meet A
            corner = tuple(self._snap(c, self.gamma.steps[0]) for c in p)
            cell = SpanComplex.of(
                _closed_box(corner, self.gamma.steps[0]),
            )
            if not _meets(self.A, cell):
                raise PreconditionError(f"{p} is outside the thickened domain")
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise PreconditionError("t must lie in [0, 1]")
        tt = Dyadic(math.floor(t * (1 << self.depth)), self.depth)
        return tuple(self._snap(c, self.fine) for c in x) + tuple(self._snap(c, self.fine) for c in y) + (tt,)

    def __call__(self, x, y, t):
        x, y = as_point(x), as_point(y)
        if len(x) != self.A.dim or len(y) != self.A.dim:
            raise PreconditionError("dimension mismatch")
        return self.field(self.snapped(x, y, t))

    def audit(self, xs, ts) -> GDeltaAudit:
        """Check the three distance bounds and membership on ``xs x xs x ts``."""
        rep = GDeltaAudit()
        for x in xs:
            for y in xs:
                lo = tuple(min(a, b) for a, b in zip(x, y))
                hi = tuple(max(a, b) for a, b in zip(x, y))
                for t in ts:
                    g = self(x, y, t)
                    rep.samples += 1
                    if not contains(self.A, g):
                        rep.violations.append({"kind": "outside", "x": x, "y": y, "t": t})
                    hgap = Fraction(hull_distance(g, lo, hi))
                    rep.max_hull_gap = max(rep.max_hull_gap, hgap)
                    if hgap > self.delta:
                        rep.violations.append({"kind": "hull", "x": x, "y": y, "t": t})
                    if t == 0:
                        gap = Fraction(cheb(x, g))
                        rep.max_start_gap = max(rep.max_start_gap, gap)
                        if gap > self.delta:
                            rep.violations.append({"kind": "start", "x": x, "y": y})
                    if t == 1:
                        gap = Fraction(cheb(y, g))
                        rep.max_end_gap = max(rep.max_end_gap, gap)
                        if gap > self.delta:
                            rep.violations.append({"kind": "end", "x": x, "y": y})
        return rep


def _closed_box(corner, side):
    return box(*[(c, c + side) for c in corner])


def _meets(A: SpanComplex, cell: SpanComplex) -> bool:
    b = cell.boxes[0]
    return any(b.intersect(a) is not None for a in A.boxes)


def build_g_delta(A: SpanComplex, delta, depth: int) -> PathField:
    return PathField(A, delta, depth)


def audit_points(A: SpanComplex, step) -> list:
    """Points of ``A`` on the cubic lattice of the given step, plus arrangement cell representatives."""
    step = Dyadic.of(step)
    pts = set()
    for b in A.boxes:
        ranges = []
        for iv in b.intervals:
            lo = math.ceil(Fraction(iv.lo) / Fraction(step))
            hi = math.floor(Fraction(iv.hi) / Fraction(step))
            ranges.append([step * k for k in range(lo, hi + 1) if step * k in iv])
        pts.update(itertools.product(*ranges))
    arr = A.arrangement
    pts.update(arr.representative(c) for c in arr.occupied_cells())
    return sorted(pts)


# ---------------------------------------------------------------------------
# Cantor schedule


@dataclass(frozen=True)
class CantorSchedule:
    """Middle-thirds interval families ``C_1 .. C_K`` and their deltas.

    Endpoints are exact ``Fraction`` values with denominator ``3**k``.
    """

    levels: tuple
    deltas: tuple

    @property
    def K(self) -> int:
        return len(self.levels)

    def parents(self, k: int, interval) -> tuple:
        s, s2 = interval
        step = Fraction(1, 3**k)
        return s - step, s2 + step


def cantor_schedule(K: int, delta0) -> CantorSchedule:
    if K < 1:
        raise ValueError("need at least one Cantor level")
    delta0 = Dyadic.of(delta0)
    levels = []
    for k in range(1, K + 1):
        ivs = []
        for alphas in itertools.product((0, 2), repeat=k - 1):
            base = sum(Fraction(a, 3**j) for j, a in enumerate(alphas, start=1))
            ivs.append((base + Fraction(1, 3**k), base + Fraction(2, 3**k)))
        levels.append(tuple(sorted(ivs)))
    deltas = tuple(delta0.shift(-k) for k in range(1, K + 1))
    return CantorSchedule(tuple(levels), deltas)


@dataclass
class HomotopyField:
    """Samples ``(x, t) -> phi(x, x0, t)``."""

    x0: tuple
    K: int
    samples: dict
    junctions: list

    def slice(self, t) -> dict:
        t = Fraction(t)
        return {x: v for (x, tt), v in self.samples.items() if tt == t}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.x0)
        w.writerow([f"x{i}" for i in range(n)] + ["t"] + [f"phi{i}" for i in range(n)])
        for (x, t), v in sorted(self.samples.items()):
            w.writerow([to_text(c) for c in x] + [f"{t.numerator}/{t.denominator}"] + [to_text(c) for c in v])
        return buf.getvalue()

    def to_off(self) -> str:
        """Trajectory polylines ``t -> phi(x, t)``, one two-vertex face per segment."""
        by_x: dict = {}
        for (x, t), v in self.samples.items():
            by_x.setdefault(x, []).append((t, v))
        verts, faces = [], []
        for x in sorted(by_x):
            traj = sorted(by_x[x])
            base = len(verts)
            verts.extend(v for _, v in traj)
            faces.extend((base + j, base + j + 1) for j in range(len(traj) - 1))
        lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
        for v in verts:
            xyz = [float(c) for c in v] + [0.0] * (3 - len(v))
            lines.append(" ".join(repr(c) for c in xyz[:3]))
        lines.extend(f"2 {a} {b}" for a, b in faces)
        return "\n".join(lines) + "\n"


class CantorHomotopy:
    """``phi(x, y, t)`` on ``{0, 1}`` and the sampled Cantor intervals."""

    def __init__(self, A: SpanComplex, schedule: CantorSchedule, depth: int):
        self.A = A
        self.schedule = schedule
        self.fields = [PathField(A, d, depth) for d in schedule.deltas]
        self._memo: dict = {}

    def locate(self, t):
        """Level and interval holding ``t``, or None if ``t`` is in a gap."""
        t = Fraction(t)
        for k, ivs in enumerate(self.schedule.levels, start=1):
            for s, s2 in ivs:
                if s <= t <= s2:
                    return k, (s, s2)
        return None

    def __call__(self, x, y, t):
        t = Fraction(t)
        key = (x, y, t)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if t == 0:
            val = x
        elif t == 1:
            val = y
        else:
            where = self.locate(t)
            if where is None:
                raise ValueError(f"t={t} lies outside the sampled Cantor intervals")
            k, (s, s2) = where
            tl, tr = self.schedule.parents(k, (s, s2))
            lam = (t - s) / (s2 - s)
            val = self.fields[k - 1](self(x, y, tl), self(x, y, tr), lam)
        self._memo[key] = val
        return val

    def junction_defects(self, x, y) -> list:
        """``(k, t_end, defect, bound)`` at both ends of every interval of every level."""
        out = []
        for k, ivs in enumerate(self.schedule.levels, start=1):
            bound = self.schedule.deltas[k - 1]
            for s, s2 in ivs:
                tl, tr = self.schedule.parents(k, (s, s2))
                out.append((k, s, cheb(self(x, y, s), self(x, y, tl)), bound))
                out.append((k, s2, cheb(self(x, y, s2), self(x, y, tr)), bound))
        return out


def cantor_homotopy(A: SpanComplex, x0, schedule: CantorSchedule, depth: int, xs=None, lam_bits: int = 2):
    """Sample ``phi(x, x0, t)`` over ``xs`` and ``lam_bits``-dyadic positions in every interval."""
    x0 = as_point(x0)
    if not contains(A, x0):
        raise PreconditionError(f"base point {x0} is not in the complex")
    h = CantorHomotopy(A, schedule, depth)
    if xs is None:
        xs = audit_points(A, schedule.deltas[0])
    ts = [Fraction(0), Fraction(1)]
    for ivs in schedule.levels:
        for s, s2 in ivs:
            ts.extend(s + (s2 - s) * Fraction(j, 1 << lam_bits) for j in range((1 << lam_bits) + 1))
    ts = sorted(set(ts))
    samples = {}
    junctions = []
    for x in xs:
        x = as_point(x)
        for t in ts:
            samples[(x, t)] = h(x, x0, t)
        junctions.extend((x,) + j for j in h.junction_defects(x, x0))
    return HomotopyField(x0, schedule.K, samples, junctions)


def contract_to_point(A: SpanComplex, x0, K: int = 4, depth: int = 2, delta0=Dyadic(1, 2), xs=None, lam_bits=2):
    return cantor_homotopy(A, x0, cantor_schedule(K, delta0), depth, xs, lam_bits)
