"""Monotone paths in box complexes.

Reachability works on the arrangement of the complex.  A monotone path
visits a sequence of arrangement cells whose per-axis indices move
monotonically, and consecutive cells are face-related (one lies in the
closure of the other).  In index terms a step changes a set ``D`` of axes
by one each, and is a face step iff the target cell has the same parity on
every axis of ``D``.  Any such cell walk is realised by a polyline through
one waypoint per cell, and every monotone path induces such a walk, so the
search is exact.  It also only depends on the cells of the endpoints, which
is what makes :func:`is_monovex` a finite check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .dyadic import Dyadic, exact, mid, to_text
from .geometry import (
    Arrangement,
    BoxRegion,
    DimensionMismatch,
    SpanComplex,
    as_point,
    contains,
)


class NotInComplex(ValueError):
    pass


def _sign(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class MonotonePath:
    """Piecewise-linear path through ``waypoints``; ``signs[i]`` is the direction of axis ``i``."""

    waypoints: tuple
    signs: tuple

    @classmethod
    def through(cls, waypoints: Sequence) -> "MonotonePath":
        pts = tuple(tuple(exact(v) for v in p) for p in waypoints)
        signs = tuple(_sign(b - a) for a, b in zip(pts[0], pts[-1]))
        return cls(pts, signs)

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def end(self):
        return self.waypoints[-1]

    def to_dict(self) -> dict:
        return {
            "waypoints": [[to_text(v) for v in p] for p in self.waypoints],
            "signs": list(self.signs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MonotonePath":
        pts = tuple(tuple(_parse_exact(v) for v in p) for p in d["waypoints"])
        return cls(pts, tuple(int(s) for s in d["signs"]))


def _parse_exact(text: str):
    try:
        return Dyadic.parse(text)
    except ValueError:
        return exact(Fraction(text))


class MonovexVerdict(NamedTuple):
    is_monovex: bool
    witness: Optional[tuple] = None


# ---------------------------------------------------------------------------
# validation


def segment_in_complex(p, q, complex_: SpanComplex) -> bool:
    """Exact check that the closed segment ``[p, q]`` lies in the complex."""
    arr = complex_.arrangement
    ts = {Fraction(0), Fraction(1)}
    for i, (a, b) in enumerate(zip(p, q)):
        if a == b:
            continue
        lo, hi = (a, b) if a < b else (b, a)
        for c in arr.coords[i]:
            if lo < c < hi:
                ts.add(Fraction(c - a) / Fraction(b - a))
    ts = sorted(ts)
    probes = list(ts) + [(s + t) / 2 for s, t in zip(ts, ts[1:])]
    for t in probes:
        pt = tuple(exact(a + (b - a) * t) if a != b else a for a, b in zip(p, q))
        if not contains(complex_, pt):
            return False
    return True


def validate_monotone(path: MonotonePath, complex_: SpanComplex) -> bool:
    pts = path.waypoints
    if not pts:
        return False
    n = complex_.dim
    if any(len(p) != n for p in pts) or len(path.signs) != n:
        return False
    for i in range(n):
        s = path.signs[i]
        for a, b in zip(pts, pts[1:]):
            d = _sign(b[i] - a[i])
            if d != 0 and d != s:
                return False
        if _sign(pts[-1][i] - pts[0][i]) != s:
            return False
    if not contains(complex_, pts[0]):
        return False
    return all(segment_in_complex(a, b, complex_) for a, b in zip(pts, pts[1:]))


# ---------------------------------------------------------------------------
# cell routes


def _deltas(free: Sequence[int], n: int) -> list:
    out = []
    for bits in itertools.product((0, 1), repeat=len(free)):
        if any(bits):
            d = [0] * n
            for ax, b in zip(free, bits):
                d[ax] = b
            out.append(tuple(d))
    return out


def _face_step(cell, delta) -> bool:
    par = None
    for c, d in zip(cell, delta):
        if d:
            if par is None:
                par = c & 1
            elif c & 1 != par:
                return False
    return True


def cell_route(arr: Arrangement, a: tuple, b: tuple) -> Optional[list]:
    """Lexicographically least monotone face walk from cell ``a`` to cell ``b``."""
    cache = arr.__dict__.setdefault("_routes", {})
    key = (a, b)
    if key in cache:
        return cache[key]
    n = len(a)
    occ = arr.occ
    direction = tuple(_sign(y - x) for x, y in zip(a, b))
    free = [i for i in range(n) if direction[i]]
    moves = [tuple(d * s for d, s in zip(delta, direction)) for delta in _deltas(free, n)]

    def inside(c):
        return all((x - ai) * s >= 0 and (bi - x) * s >= 0 for x, ai, bi, s in zip(c, a, b, direction))

    # cells that can still reach b
    good = {b}
    stack = [b]
    while stack:
        e = stack.pop()
        for mv in moves:
            p = tuple(x - m for x, m in zip(e, mv))
            if p in good or not inside(p) or not occ[p]:
                continue
            if not _face_step(e, mv):
                continue
            good.add(p)
            stack.append(p)
    if a not in good:
        cache[key] = None
        return None
    route = [a]
    cur = a
    while cur != b:
        nxt = None
        for mv in moves:
            e = tuple(x + m for x, m in zip(cur, mv))
            if e in good and _face_step(e, mv) and (nxt is None or e < nxt):
                nxt = e
        route.append(nxt)
        cur = nxt
    cache[key] = route
    return route


def realize(arr: Arrangement, cells: list, x, y) -> list:
    """One waypoint per cell, monotone per axis, starting at ``x`` and ending at ``y``."""
    m = len(cells) - 1
    n = len(x)
    cols = []
    for i in range(n):
        idx = [c[i] for c in cells]
        vals = [None] * (m + 1)
        k = 0
        while k <= m:
            j = idx[k]
            if j % 2 == 0:
                vals[k] = arr.coords[i][j // 2]
                k += 1
                continue
            k2 = k
            while k2 + 1 <= m and idx[k2 + 1] == j:
                k2 += 1
            entry = x[i] if k == 0 else arr.coords[i][idx[k - 1] // 2]
            exit_ = y[i] if k2 == m else arr.coords[i][idx[k2 + 1] // 2]
            inner = mid(entry, exit_)
            for t in range(k, k2 + 1):
                vals[t] = inner
            if k == 0:
                vals[0] = x[i]
            if k2 == m:
                vals[m] = y[i]
            k = k2 + 1
        cols.append(vals)
    return [tuple(cols[i][k] for i in range(n)) for k in range(m + 1)]


def monotone_reachable(complex_: SpanComplex, x, y) -> Optional[MonotonePath]:
    """A certified monotone path from ``x`` to ``y`` inside the complex, or None."""
    x, y = as_point(x), as_point(y)
    if len(x) != complex_.dim or len(y) != complex_.dim:
        raise DimensionMismatch("endpoint dimension does not match the complex")
    for p in (x, y):
        if not contains(complex_, p):
            raise NotInComplex(f"{tuple(map(str, p))} is not in the complex")
    if x == y:
        return MonotonePath((x, y), tuple(0 for _ in x))
    found = route_with_cells(complex_, x, y)
    return None if found is None else found[0]


def route_with_cells(complex_: SpanComplex, x, y):
    arr = complex_.arrangement
    a, b = arr.cell_of(x), arr.cell_of(y)
    cells = cell_route(arr, a, b)
    if cells is None:
        return None
    if len(cells) == 1:
        cells = [a, a]
    pts = realize(arr, cells, x, y)
    signs = tuple(_sign(q - p) for p, q in zip(x, y))
    return MonotonePath(tuple(pts), signs), cells


def point_at_level(complex_: SpanComplex, x, y, axis: int, value):
    """A point on a monotone path from ``x`` to ``y`` whose ``axis`` coordinate is ``value``.

    ``value`` must lie between ``x[axis]`` and ``y[axis]``.  The returned
    point is a waypoint of a valid monotone path (inserted if needed), so it
    stays dyadic.  Returns None when no monotone path exists.
    """
    if x == y:
        return x
    found = route_with_cells(complex_, x, y)
    if found is None:
        return None
    path, cells = found
    pts = path.waypoints
    s = _sign(y[axis] - x[axis])
    if s == 0:
        return pts[0]
    for k, p in enumerate(pts):
        if p[axis] == value:
            return p
        if (p[axis] - value) * s > 0:
            break
    else:
        raise AssertionError("level not crossed; value outside the endpoint range")
    # crossing strictly inside segment k-1 -> k; use the cell whose open gap holds value
    if cells[k][axis] % 2 == 1:
        base = pts[k]
    else:
        base = pts[k - 1]
    return base[:axis] + (value,) + base[axis + 1 :]


# ---------------------------------------------------------------------------
# monovexity


def is_monovex(complex_: SpanComplex) -> MonovexVerdict:
    """Decide monovexity exactly over arrangement-cell pairs.

    For each orthant direction ``s`` (first sign fixed, reversal covers the
    rest) a sweep over occupied cells in ``s``-order accumulates, as an
    integer bitset, the cells that monotonically reach each cell.  A cell is
    fine when that set equals every occupied cell of its down-orthant, which
    is compared by count using a cumulative sum.
    """
    if complex_.is_empty:
        return MonovexVerdict(True)
    arr = complex_.arrangement
    n = arr.n
    occ = arr.occ
    shape = occ.shape
    deltas = _deltas(list(range(n)), n)
    for tail in itertools.product((1, -1), repeat=n - 1):
        s = (1,) + tail
        flip = tuple(i for i in range(n) if s[i] < 0)
        O = np.flip(occ, axis=flip) if flip else occ
        counts = O.astype(np.int64)
        for ax in range(n):
            counts = np.cumsum(counts, axis=ax)
        bad = _sweep(O, counts, deltas)
        if bad is not None:
            c, d = bad

            def unflip(cell):
                return tuple(shape[i] - 1 - v if s[i] < 0 else v for i, v in enumerate(cell))

            return MonovexVerdict(False, (arr.representative(unflip(c)), arr.representative(unflip(d))))
    return MonovexVerdict(True)


def _sweep(O: np.ndarray, counts: np.ndarray, deltas: list):
    shape = O.shape
    n = len(shape)
    strides = [1] * n
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    cells = np.argwhere(O)
    flat = np.ravel_multi_index(cells.T, shape) if len(cells) else np.zeros(0, dtype=np.int64)
    pos = np.full(O.size, -1, dtype=np.int64)
    pos[flat] = np.arange(len(cells))
    pos = pos.tolist()
    counts_flat = counts.ravel().tolist()
    offsets = [sum(d * st for d, st in zip(delta, strides)) for delta in deltas]
    reach: dict = {}
    slab_of = cells[:, 0].tolist() if len(cells) else []
    cells_l = cells.tolist()
    flat_l = flat.tolist()
    current_slab = None
    slab_members: dict = {}
    for k, cell in enumerate(cells_l):
        slab = slab_of[k]
        if slab != current_slab:
            for old in [t for t in slab_members if t < slab - 1]:
                for q in slab_members.pop(old):
                    reach.pop(q, None)
            current_slab = slab
        slab_members.setdefault(slab, []).append(k)
        f = flat_l[k]
        r = 1 << k
        for delta, off in zip(deltas, offsets):
            ok = True
            par = -1
            for c, d in zip(cell, delta):
                if d:
                    if c == 0:
                        ok = False
                        break
                    if par < 0:
                        par = c & 1
                    elif c & 1 != par:
                        ok = False
                        break
            if not ok:
                continue
            q = pos[f - off]
            if q >= 0:
                r |= reach[q]
        reach[k] = r
        if r.bit_count() != counts_flat[f]:
            # find a down-orthant cell missing from r
            sub = tuple(slice(0, v + 1) for v in cell)
            for c in np.argwhere(O[sub]):
                q = pos[int(np.ravel_multi_index(tuple(c), shape))]
                if not (r >> q) & 1:
                    return tuple(int(v) for v in c), tuple(cell)
            raise AssertionError("count mismatch without a missing cell")
    return None


# ---------------------------------------------------------------------------
# Minkowski lift


def lift_minkowski_path(gamma_prime: MonotonePath, a_prime, b_prime, r: BoxRegion) -> MonotonePath:
    """Lift a monotone path in ``A`` to one in ``A + R`` from ``x'+a'`` to ``y'+b'``.

    On axes where ``gamma_prime`` moves, the offset is an affine function of
    the path coordinate (a diagonal map plus shift fixed by the endpoint
    offsets); on frozen axes it is linear in the path parameter.
    """
    a_prime, b_prime = as_point(a_prime), as_point(b_prime)
    if a_prime not in r or b_prime not in r:
        raise NotInComplex("offset endpoints must lie in the box")
    pts = list(gamma_prime.waypoints)
    if len(pts) == 1:
        pts = pts * 2
    xp, yp = pts[0], pts[-1]
    m = len(pts) - 1
    n = len(xp)
    out = []
    for k, g in enumerate(pts):
        q = []
        for i in range(n):
            if xp[i] != yp[i]:
                scale = Fraction(b_prime[i] - a_prime[i]) / Fraction(yp[i] - xp[i])
                off = a_prime[i] + scale * Fraction(g[i] - xp[i])
            else:
                off = a_prime[i] + Fraction(b_prime[i] - a_prime[i]) * Fraction(k, m)
            q.append(exact(g[i] + off))
        out.append(tuple(q))
    return MonotonePath.through(out)
