"""Axis-aligned box complexes with exact dyadic endpoints.

A :class:`SpanComplex` is a finite union of boxes, each box a product of
intervals whose ends are independently open or closed.  Points are plain
tuples of exact numbers (``Dyadic``, or ``Fraction`` for the few
constructions that leave the dyadics).

The :class:`Arrangement` of a complex is the grid cut out by all per-axis
endpoints.  Cells are addressed by integer index tuples: on each axis an
even index ``2j`` is the endpoint ``coords[j]`` and an odd index ``2j+1``
is the open gap ``(coords[j], coords[j+1])``.  Every box of the complex is
a product of contiguous index ranges, so membership, subset tests and path
search all reduce to integer work on a boolean grid.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .dyadic import ZERO, Dyadic, Number, exact, mid, to_text

Point = tuple


class DimensionMismatch(ValueError):
    pass


def as_point(coords: Iterable) -> Point:
    """Coerce coordinates to exact numbers (ints and strings become Dyadic)."""
    out = []
    for c in coords:
        if isinstance(c, (int, str)):
            out.append(Dyadic.of(c))
        elif isinstance(c, Fraction):
            out.append(exact(c))
        elif isinstance(c, Dyadic):
            out.append(c)
        else:
            out.append(Dyadic.of(c))
    return tuple(out)


def cheb(p: Sequence, q: Sequence) -> Number:
    """Maximum-metric distance between two points."""
    return max((abs(a - b) for a, b in zip(p, q)), default=ZERO)


@dataclass(frozen=True)
class Interval:
    lo: Dyadic
    hi: Dyadic
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = Dyadic.of(self.lo), Dyadic.of(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi:
            raise ValueError(f"empty interval: lo {lo} > hi {hi}")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise ValueError(f"empty interval at {lo}: a point interval must be closed")

    @classmethod
    def point(cls, v) -> "Interval":
        return cls(v, v)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_closed(self) -> bool:
        return self.lo_closed and self.hi_closed

    def __contains__(self, v) -> bool:
        if v < self.lo or v > self.hi:
            return False
        if v == self.lo and not self.lo_closed:
            return False
        if v == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval | None":
        if self.lo > other.lo:
            lo, lo_c = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_c = other.lo, other.lo_closed
        else:
            lo, lo_c = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_c = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_c = other.hi, other.hi_closed
        else:
            hi, hi_c = self.hi, self.hi_closed and other.hi_closed
        if lo > hi or (lo == hi and not (lo_c and hi_c)):
            return None
        return Interval(lo, hi, lo_c, hi_c)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(
            self.lo + other.lo,
            self.hi + other.hi,
            self.lo_closed and other.lo_closed,
            self.hi_closed and other.hi_closed,
        )

    def gap(self, v) -> Number:
        """Distance from ``v`` to the closure of the interval."""
        if v < self.lo:
            return self.lo - v
        if v > self.hi:
            return v - self.hi
        return ZERO

    def clamp(self, v):
        return self.lo if v < self.lo else self.hi if v > self.hi else v

    def to_dict(self) -> dict:
        return {
            "lo": to_text(self.lo),
            "hi": to_text(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Interval":
        return cls(
            Dyadic.of(d["lo"]),
            Dyadic.of(d["hi"]),
            bool(d.get("lo_closed", True)),
            bool(d.get("hi_closed", True)),
        )

    def __str__(self) -> str:
        if self.is_point:
            return f"{{{self.lo}}}"
        return f"{'[' if self.lo_closed else '('}{self.lo},{self.hi}{']' if self.hi_closed else ')'}"


@dataclass(frozen=True)
class BoxRegion:
    intervals: tuple

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def dimension(self) -> int:
        return sum(not iv.is_point for iv in self.intervals)

    @property
    def is_closed(self) -> bool:
        return all(iv.is_closed for iv in self.intervals)

    def __contains__(self, p) -> bool:
        return all(v in iv for v, iv in zip(p, self.intervals))

    def vertices(self) -> list:
        return [tuple(c) for c in itertools.product(*[(iv.lo,) if iv.is_point else (iv.lo, iv.hi) for iv in self.intervals])]

    def closure(self) -> "BoxRegion":
        return BoxRegion(tuple(Interval(iv.lo, iv.hi) for iv in self.intervals))

    def intersect(self, other: "BoxRegion") -> "BoxRegion | None":
        out = []
        for a, b in zip(self.intervals, other.intervals):
            c = a.intersect(b)
            if c is None:
                return None
            out.append(c)
        return BoxRegion(tuple(out))

    def lower(self) -> Point:
        return tuple(iv.lo for iv in self.intervals)

    def upper(self) -> Point:
        return tuple(iv.hi for iv in self.intervals)

    def center(self) -> Point:
        return tuple(mid(iv.lo, iv.hi) for iv in self.intervals)

    def __str__(self) -> str:
        return "x".join(str(iv) for iv in self.intervals)


def box(*ranges) -> BoxRegion:
    """Build a box from per-axis ``(lo, hi)`` pairs (closed), scalars, or Intervals."""
    ivs = []
    for r in ranges:
        if isinstance(r, Interval):
            ivs.append(r)
        elif isinstance(r, (tuple, list)):
            if len(r) == 2:
                ivs.append(Interval(r[0], r[1]))
            else:
                ivs.append(Interval(*r))
        else:
            ivs.append(Interval.point(r))
    return BoxRegion(tuple(ivs))


class Distance(NamedTuple):
    value: Number
    attained: bool


@dataclass(frozen=True)
class SpanComplex:
    """Finite union of boxes in ``R^dim``; the empty list is the empty set."""

    dim: int
    boxes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(self.boxes))
        for b in self.boxes:
            if b.n != self.dim:
                raise DimensionMismatch(f"box {b} has {b.n} axes, complex has {self.dim}")

    @classmethod
    def of(cls, *boxes: BoxRegion) -> "SpanComplex":
        if not boxes:
            raise ValueError("use SpanComplex(dim) for the empty complex")
        return cls(boxes[0].n, boxes)

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    @property
    def is_closed(self) -> bool:
        return all(b.is_closed for b in self.boxes)

    def __iter__(self):
        return iter(self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)

    def __contains__(self, p) -> bool:
        return contains(self, p)

    @cached_property
    def arrangement(self) -> "Arrangement":
        return Arrangement(self)

    def union(self, other: "SpanComplex") -> "SpanComplex":
        _check_dims(self.dim, other.dim)
        return SpanComplex(self.dim, self.boxes + other.boxes)

    def bounds(self) -> BoxRegion:
        """Closed b-hull of the closure of the complex."""
        if self.is_empty:
            raise ValueError("empty complex has no bounds")
        return BoxRegion(
            tuple(
                Interval(min(b.intervals[i].lo for b in self.boxes), max(b.intervals[i].hi for b in self.boxes))
                for i in range(self.dim)
            )
        )

    def to_dict(self) -> dict:
        return {"dim": self.dim, "boxes": [[iv.to_dict() for iv in b.intervals] for b in self.boxes]}

    @classmethod
    def from_dict(cls, d: dict) -> "SpanComplex":
        dim = int(d["dim"])
        boxes = []
        for raw in d["boxes"]:
            if len(raw) != dim:
                raise DimensionMismatch(f"box with {len(raw)} intervals in a {dim}-dimensional complex")
            boxes.append(BoxRegion(tuple(Interval.from_dict(iv) for iv in raw)))
        return cls(dim, tuple(boxes))


def _check_dims(a: int, b: int):
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} vs {b}")


@dataclass(frozen=True)
class Lattice:
    """The b-lattice ``origin + {(a_1 k_1, ..., a_n k_n)}``."""

    steps: tuple
    origin: tuple = None

    def __post_init__(self):
        steps = tuple(Dyadic.of(s) for s in self.steps)
        if any(s <= 0 for s in steps):
            raise ValueError("lattice steps must be positive")
        object.__setattr__(self, "steps", steps)
        origin = tuple(ZERO for _ in steps) if self.origin is None else as_point(self.origin)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def cubic(cls, n: int, step=1) -> "Lattice":
        return cls(tuple(Dyadic.of(step) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.steps)

    def point(self, k: Sequence[int]) -> Point:
        return tuple(o + s * int(ki) for o, s, ki in zip(self.origin, self.steps, k))

    def point_coord(self, axis: int, k: int):
        return self.origin[axis] + self.steps[axis] * int(k)

    def refined(self, k: int = 1) -> "Lattice":
        return Lattice(tuple(s.shift(-k) for s in self.steps), self.origin)

    def floor_index(self, axis: int, v) -> int:
        return math.floor(Fraction(v - self.origin[axis]) / Fraction(self.steps[axis]))

    def ceil_index(self, axis: int, v) -> int:
        return math.ceil(Fraction(v - self.origin[axis]) / Fraction(self.steps[axis]))

    def is_aligned(self, axis: int, v) -> bool:
        return (Fraction(v - self.origin[axis]) / Fraction(self.steps[axis])).denominator == 1


# ---------------------------------------------------------------------------
# point queries


def contains(complex_: SpanComplex, p) -> bool:
    _check_dims(complex_.dim, len(p))
    return any(p in b for b in complex_.boxes)


def box_distance(p, b: BoxRegion) -> Distance:
    gaps = [iv.gap(v) for v, iv in zip(p, b.intervals)]
    d = max(gaps, default=ZERO)
    if d == 0:
        return Distance(d, p in b)
    attained = True
    for v, iv, g in zip(p, b.intervals, gaps):
        if g == d:
            end_closed = iv.lo_closed if v < iv.lo else iv.hi_closed
            attained = attained and end_closed
    return Distance(d, attained)


def cheb_distance(p, complex_: SpanComplex) -> Distance:
    """Infimum max-metric distance from ``p`` to the complex.

    ``attained`` is False when the infimum is only approached through an
    open facet.
    """
    if complex_.is_empty:
        raise ValueError("distance to an empty complex")
    _check_dims(complex_.dim, len(p))
    best = None
    for b in complex_.boxes:
        d = box_distance(p, b)
        if best is None or d.value < best.value or (d.value == best.value and d.attained and not best.attained):
            best = d
    return best


def nearest_point(complex_: SpanComplex, p) -> Point:
    """A closest point of a closed complex to ``p`` (lexicographically least among ties)."""
    if complex_.is_empty:
        raise ValueError("nearest point in an empty complex")
    best = None
    for b in complex_.boxes:
        q = tuple(iv.clamp(v) for v, iv in zip(p, b.intervals))
        key = (cheb(p, q), q)
        if best is None or key < best:
            best = key
    return best[1]


def bhull(points: Sequence) -> BoxRegion:
    """Smallest closed box containing the points."""
    if not points:
        raise ValueError("b-hull of an empty point set")
    n = len(points[0])
    for q in points:
        _check_dims(n, len(q))
    return BoxRegion(tuple(Interval(min(q[i] for q in points), max(q[i] for q in points)) for i in range(n)))


def in_hull(q, lo: Sequence, hi: Sequence) -> bool:
    return all(a <= v <= b for v, a, b in zip(q, lo, hi))


def hull_distance(q, lo: Sequence, hi: Sequence) -> Number:
    """Max-metric distance from ``q`` to the closed box ``[lo, hi]``."""
    return max((a - v if v < a else v - b if v > b else ZERO for v, a, b in zip(q, lo, hi)), default=ZERO)


# ---------------------------------------------------------------------------
# set operations


def project(complex_: SpanComplex, axes: Sequence[int]) -> SpanComplex:
    """Coordinate projection onto ``axes`` (0-based, kept in the given order)."""
    axes = list(axes)
    if not axes:
        raise ValueError("projection onto an empty set of axes")
    if any(a < 0 or a >= complex_.dim for a in axes):
        raise DimensionMismatch(f"axes {axes} out of range for dim {complex_.dim}")
    return SpanComplex(len(axes), tuple(BoxRegion(tuple(b.intervals[a] for a in axes)) for b in complex_.boxes))


def minkowski_box(complex_: SpanComplex, r: BoxRegion) -> SpanComplex:
    """``A + R``: per-box interval sums; an end is closed iff both summand ends are."""
    _check_dims(complex_.dim, r.n)
    return SpanComplex(
        complex_.dim,
        tuple(BoxRegion(tuple(a + b for a, b in zip(bx.intervals, r.intervals))) for bx in complex_.boxes),
    )


def intersect_box(complex_: SpanComplex, r: BoxRegion) -> SpanComplex:
    _check_dims(complex_.dim, r.n)
    out = []
    for b in complex_.boxes:
        c = b.intersect(r)
        if c is not None:
            out.append(c)
    return SpanComplex(complex_.dim, tuple(out))


def closed_ball(center, radius) -> BoxRegion:
    return BoxRegion(tuple(Interval(c - radius, c + radius) for c in center))


def open_ball(center, radius) -> BoxRegion:
    return BoxRegion(tuple(Interval(c - radius, c + radius, False, False) for c in center))


def is_subset(a: SpanComplex, b: SpanComplex) -> bool:
    """Exact test ``a ⊆ b`` on the common arrangement."""
    _check_dims(a.dim, b.dim)
    if a.is_empty:
        return True
    if b.is_empty:
        return False
    # fast path: every box of a inside a single box of b
    if all(any(_box_in_box(x, y) for y in b.boxes) for x in a.boxes):
        return True
    arr = Arrangement(b, extra=a)
    for bx in a.boxes:
        sl = arr.box_slices(bx)
        if not arr.occ[sl].all():
            return False
    return True


def _box_in_box(x: BoxRegion, y: BoxRegion) -> bool:
    for p, q in zip(x.intervals, y.intervals):
        if p.lo < q.lo or (p.lo == q.lo and p.lo_closed and not q.lo_closed):
            return False
        if p.hi > q.hi or (p.hi == q.hi and p.hi_closed and not q.hi_closed):
            return False
    return True


def slice_complex(complex_: SpanComplex, axis: int, value) -> SpanComplex:
    """``{y : (y with value inserted at axis) in complex}`` as a complex of one dimension less."""
    out = []
    for b in complex_.boxes:
        if value in b.intervals[axis]:
            out.append(BoxRegion(b.intervals[:axis] + b.intervals[axis + 1 :]))
    return SpanComplex(complex_.dim - 1, tuple(out))


# ---------------------------------------------------------------------------
# arrangement


class Arrangement:
    """Cell decomposition induced by all per-axis endpoints of a complex.

    ``extra`` (a complex or a list of points) contributes additional cut
    coordinates without adding to the occupied set.
    """

    def __init__(self, complex_: SpanComplex, extra=None):
        self.complex = complex_
        self.n = complex_.dim
        cuts = [set() for _ in range(self.n)]
        for b in complex_.boxes:
            for i, iv in enumerate(b.intervals):
                cuts[i].add(iv.lo)
                cuts[i].add(iv.hi)
        if extra is not None:
            items = extra.boxes if isinstance(extra, SpanComplex) else extra
            for it in items:
                if isinstance(it, BoxRegion):
                    for i, iv in enumerate(it.intervals):
                        cuts[i].add(iv.lo)
                        cuts[i].add(iv.hi)
                else:
                    for i, v in enumerate(it):
                        cuts[i].add(exact(v))
        self.coords = tuple(tuple(sorted(c)) for c in cuts)
        if any(not c for c in self.coords):
            self.shape = tuple(0 for _ in range(self.n))
        else:
            self.shape = tuple(2 * len(c) - 1 for c in self.coords)
        self.occ = np.zeros(self.shape, dtype=bool)
        for b in complex_.boxes:
            self.occ[self.box_slices(b)] = True

    def index_range(self, axis: int, iv: Interval) -> tuple:
        c = self.coords[axis]
        lo = 2 * bisect.bisect_left(c, iv.lo) + (0 if iv.lo_closed else 1)
        hi = 2 * bisect.bisect_left(c, iv.hi) - (0 if iv.hi_closed else 1)
        return lo, hi

    def box_slices(self, b: BoxRegion) -> tuple:
        out = []
        for i, iv in enumerate(b.intervals):
            lo, hi = self.index_range(i, iv)
            out.append(slice(lo, hi + 1))
        return tuple(out)

    def axis_index(self, axis: int, v) -> "int | None":
        c = self.coords[axis]
        if not c or v < c[0] or v > c[-1]:
            return None
        j = bisect.bisect_left(c, v)
        if c[j] == v:
            return 2 * j
        return 2 * j - 1

    def cell_of(self, p) -> "tuple | None":
        idx = []
        for i, v in enumerate(p):
            k = self.axis_index(i, v)
            if k is None:
                return None
            idx.append(k)
        return tuple(idx)

    def occupied(self, cell) -> bool:
        return bool(self.occ[cell])

    def axis_interval(self, axis: int, k: int) -> tuple:
        """``(lo, hi)`` of the 1-D cell; ``lo == hi`` for an endpoint cell."""
        c = self.coords[axis]
        if k % 2 == 0:
            return c[k // 2], c[k // 2]
        return c[k // 2], c[k // 2 + 1]

    def representative(self, cell) -> Point:
        out = []
        for i, k in enumerate(cell):
            lo, hi = self.axis_interval(i, k)
            out.append(lo if k % 2 == 0 else mid(lo, hi))
        return tuple(out)

    def cell_box(self, cell) -> BoxRegion:
        ivs = []
        for i, k in enumerate(cell):
            lo, hi = self.axis_interval(i, k)
            ivs.append(Interval(lo, hi) if k % 2 == 0 else Interval(lo, hi, False, False))
        return BoxRegion(tuple(ivs))

    def occupied_cells(self) -> list:
        return [tuple(int(v) for v in c) for c in np.argwhere(self.occ)]

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.shape)) if self.shape else 0


def arrangement_cells(complex_: SpanComplex) -> list:
    """The arrangement cells that make up the union, as disjoint boxes."""
    if complex_.is_empty:
        return []
    arr = complex_.arrangement
    return [arr.cell_box(c) for c in arr.occupied_cells()]


def elementary_boxes(lat: Lattice, l: int, window: BoxRegion) -> list:
    """All boxes of ``P_l(lat)`` meeting the window in their full dimension.

    Boxes that only touch the window along a lower-dimensional face are left
    out, so a lattice-aligned window yields exactly the boxes it contains.
    """
    n = lat.n
    _check_dims(n, window.n)
    if not 0 <= l <= n:
        raise ValueError(f"l={l} outside 0..{n}")
    per_axis = []
    for i, iv in enumerate(window.intervals):
        lo_k = lat.floor_index(i, iv.lo) - 1
        hi_k = lat.ceil_index(i, iv.hi) + 1
        points, segs = [], []
        for k in range(lo_k, hi_k + 1):
            v = lat.origin[i] + lat.steps[i] * k
            if iv.intersect(Interval.point(v)) is not None:
                points.append(Interval.point(v))
            seg = Interval(v, v + lat.steps[i])
            # a segment counts only if it overlaps the window in positive length
            cut = iv.intersect(seg)
            if cut is not None and not cut.is_point:
                segs.append(seg)
        per_axis.append((points, segs))
    out = []
    for axes in itertools.combinations(range(n), l):
        choice = [per_axis[i][1] if i in axes else per_axis[i][0] for i in range(n)]
        for ivs in itertools.product(*choice):
            out.append(BoxRegion(tuple(ivs)))
    return out
