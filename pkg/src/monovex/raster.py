"""Conservative voxel covers of Minkowski sums of segment sets.

Each pair of segments sums to a (possibly degenerate) parallelogram.  A
voxel is occupied iff its closed cube meets one of those parallelograms,
decided exactly by the separating axis test in integer coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .dyadic import Dyadic
from .geometry import BoxRegion, Interval, SpanComplex, as_point


@dataclass(frozen=True)
class SegmentSet:
    segments: tuple

    def __post_init__(self):
        segs = tuple((as_point(a), as_point(b)) for a, b in self.segments)
        if not segs:
            raise ValueError("empty segment set")
        n = len(segs[0][0])
        if any(len(a) != n or len(b) != n for a, b in segs):
            raise ValueError("segments of mixed dimension")
        object.__setattr__(self, "segments", segs)

    @property
    def n(self) -> int:
        return len(self.segments[0][0])

    @classmethod
    def polyline(cls, *points) -> "SegmentSet":
        return cls(tuple(zip(points, points[1:])))

    @classmethod
    def point(cls, p) -> "SegmentSet":
        return cls(((p, p),))


@dataclass(frozen=True)
class VoxelGrid:
    """Occupied voxels ``k`` standing for ``[lo + k*h, lo + (k+1)*h]``."""

    h: Dyadic
    window: BoxRegion
    occupancy: frozenset

    @property
    def n(self) -> int:
        return self.window.n

    @property
    def shape(self) -> tuple:
        return tuple(int((iv.hi - iv.lo) / self.h) for iv in self.window.intervals)

    def voxel_box(self, k) -> BoxRegion:
        return BoxRegion(
            tuple(Interval(iv.lo + self.h * ki, iv.lo + self.h * (ki + 1)) for iv, ki in zip(self.window.intervals, k))
        )

    def as_array(self) -> np.ndarray:
        arr = np.zeros(self.shape, dtype=bool)
        if self.occupancy:
            idx = np.array(sorted(self.occupancy))
            arr[tuple(idx.T)] = True
        return arr

    def occupied(self, p) -> bool:
        """Whether the point lies in the closed union of occupied voxels."""
        cands = []
        for v, iv in zip(p, self.window.intervals):
            t = Fraction(v - iv.lo) / Fraction(self.h)
            k = int(t // 1)
            cands.append((k - 1, k) if t.denominator == 1 else (k,))
        return any(c in self.occupancy for c in itertools.product(*cands))


def _bbox_window(A: SegmentSet, B: SegmentSet, h: Dyadic) -> BoxRegion:
    ivs = []
    for i in range(A.n):
        lo = min(p[i] for s in A.segments for p in s) + min(p[i] for s in B.segments for p in s)
        hi = max(p[i] for s in A.segments for p in s) + max(p[i] for s in B.segments for p in s)
        klo = int(Fraction(lo) / Fraction(h) // 1) - 1
        khi = -int(-Fraction(hi) / Fraction(h) // 1) + 1
        ivs.append(Interval(h * klo, h * khi))
    return BoxRegion(tuple(ivs))


def _axes(u, v, n):
    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    axes = list(basis)
    if n == 3:

        def cross(a, b):
            return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])

        axes.append(cross(u, v))
        for e in basis:
            axes.append(cross(u, e))
            axes.append(cross(v, e))
    elif n == 2:
        axes.append((-u[1], u[0]))
        axes.append((-v[1], v[0]))
    else:
        raise ValueError("rasterization supports n = 2 or 3")
    return [a for a in axes if any(a)]


def rasterize_minkowski(A: SegmentSet, B: SegmentSet, h, window: BoxRegion = None) -> VoxelGrid:
    """Voxels of side ``h`` whose closed cube meets ``A + B`` (clipped to ``window``)."""
    h = Dyadic.of(h)
    if h <= 0:
        raise ValueError("resolution must be positive")
    if A.n != B.n:
        raise ValueError("segment sets of different dimension")
    n = A.n
    if window is None:
        window = _bbox_window(A, B, h)
    lo = window.lower()
    shape = tuple(int((iv.hi - iv.lo) / h) for iv in window.intervals)
    occ = np.zeros(shape, dtype=bool)
    # integer coordinates: voxel k spans [k*S, (k+1)*S]
    fracs = [Fraction(c - lo[i]) / Fraction(h) for s in A.segments + B.segments for p in s for i, c in enumerate(p)]
    S = 1
    for f in fracs:
        S = lcm(S, f.denominator)

    def scaled(p, origin_shift):
        return tuple(int(Fraction(c - (lo[i] if origin_shift else 0)) / Fraction(h) * S) for i, c in enumerate(p))

    grids = np.meshgrid(*[np.arange(k, dtype=np.int64) for k in shape], indexing="ij")
    for (a0, a1), (b0, b1) in itertools.product(A.segments, B.segments):
        base = scaled(tuple(x + y for x, y in zip(a0, b0)), True)
        u = scaled(tuple(y - x for x, y in zip(a0, a1)), False)
        v = scaled(tuple(y - x for x, y in zip(b0, b1)), False)
        verts = [tuple(bb + s * uu + t * vv for bb, uu, vv in zip(base, u, v)) for s in (0, 1) for t in (0, 1)]
        # candidate voxels from the bounding box
        sl = []
        for i in range(n):
            vmin = min(q[i] for q in verts)
            vmax = max(q[i] for q in verts)
            k0 = max(0, -(-vmin // S) - 1)
            k1 = min(shape[i] - 1, vmax // S)
            if k0 > k1:
                sl = None
                break
            sl.append(slice(k0, k1 + 1))
        if sl is None:
            continue
        sl = tuple(sl)
        hit = np.ones(occ[sl].shape, dtype=bool)
        ks = [g[sl] for g in grids]
        for ax in _axes(u, v, n):
            proj = [sum(a * c for a, c in zip(ax, q)) for q in verts]
            pmin, pmax = min(proj), max(proj)
            lo_off = S * sum(min(0, a) for a in ax)
            hi_off = S * sum(max(0, a) for a in ax)
            dot = sum(a * S * k for a, k in zip(ax, ks) if a)
            if isinstance(dot, int):
                dot = np.zeros_like(hit, dtype=np.int64)
            hit &= (dot + lo_off <= pmax) & (pmin <= dot + hi_off)
        occ[sl] |= hit
    occupancy = frozenset(tuple(int(v) for v in k) for k in np.argwhere(occ))
    return VoxelGrid(h, window, occupancy)


def to_complex(grid: VoxelGrid) -> SpanComplex:
    """Closed complex of occupied voxels, merging runs along the last axis."""
    arr = grid.as_array()
    n = grid.n
    boxes = []
    lo = grid.window.lower()
    h = grid.h
    if arr.size == 0:
        return SpanComplex(n)
    last = arr.shape[-1]
    for head in itertools.product(*[range(k) for k in arr.shape[:-1]]):
        row = arr[head]
        k = 0
        while k < last:
            if not row[k]:
                k += 1
                continue
            k2 = k
            while k2 + 1 < last and row[k2 + 1]:
                k2 += 1
            ivs = [Interval(lo[i] + h * c, lo[i] + h * (c + 1)) for i, c in enumerate(head)]
            ivs.append(Interval(lo[-1] + h * k, lo[-1] + h * (k2 + 1)))
            boxes.append(BoxRegion(tuple(ivs)))
            k = k2 + 1
    return SpanComplex(n, tuple(boxes))


def to_off(grid: VoxelGrid) -> str:
    """OFF mesh of the boundary faces of the occupied voxels."""
    if grid.n != 3:
        raise ValueError("OFF export needs a 3-D grid")
    occ = grid.occupancy
    verts: dict = {}
    faces = []
    quads = {
        0: [(0, 0, 0), (0, 1, 0), (0, 1, 1), (0, 0, 1)],
        1: [(0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 0, 0)],
        2: [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)],
    }
    for k in sorted(occ):
        for ax in range(3):
            for side in (0, 1):
                nb = list(k)
                nb[ax] += 1 if side else -1
                if tuple(nb) in occ:
                    continue
                face = []
                for q in quads[ax]:
                    c = list(q)
                    c[ax] += side
                    key = tuple(ki + ci for ki, ci in zip(k, c))
                    face.append(verts.setdefault(key, len(verts)))
                faces.append(face)
    lo = grid.window.lower()
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    for key, _ in sorted(verts.items(), key=lambda kv: kv[1]):
        lines.append(" ".join(repr(float(lo[i] + grid.h * key[i])) for i in range(3)))
    for f in faces:
        lines.append("4 " + " ".join(map(str, f)))
    return "\n".join(lines) + "\n"
