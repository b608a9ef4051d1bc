"""Extension of lattice samples into a monovex set by dyadic refinement.

Values are fixed on a lattice first.  Each refinement step assigns every
new point (the center of a unique face of the coarser lattice) a point of
the target set found on a monotone path between the vertex images that
attain the extreme coordinate on the current rotation axis.  The rotation
axis at step ``k -> k+1`` is ``k mod n``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dyadic import Dyadic, exact, mid, to_text
from .geometry import BoxRegion, Interval, Lattice, SpanComplex, as_point, contains
from .paths import point_at_level


class NoMonotonePath(RuntimeError):
    """The target set has no monotone path between two required points."""

    def __init__(self, x, y):
        super().__init__(f"no monotone path from {x} to {y}")
        self.pair = (x, y)


def rotation_axis(level: int, n: int) -> int:
    """Axis whose spread halves when points of ``level`` are created (``level >= 1``)."""
    return (level - 1) % n


def phi_r_i(points, axis: int, A: SpanComplex):
    """A point of ``A`` at the mid level of the extreme ``axis`` values.

    The smallest index wins ties for the minimum and maximum.
    """
    points = [as_point(p) for p in points]
    values = [p[axis] for p in points]
    lo, hi = min(values), max(values)
    jmin, jmax = values.index(lo), values.index(hi)
    if jmin == jmax:
        return points[jmin]
    target = mid(lo, hi)
    q = point_at_level(A, points[jmin], points[jmax], axis, target)
    if q is None:
        raise NoMonotonePath(points[jmin], points[jmax])
    return q


@dataclass
class LatticeSample:
    """Values on the points of ``lat``.

    ``values`` is either a mapping or a function of the lattice point.
    ``domain`` (optional) is the union of lattice boxes the field lives on.
    """

    lat: Lattice
    values: Mapping | Callable
    domain: SpanComplex | None = None

    def __call__(self, p):
        if callable(self.values):
            return self.values(p)
        return self.values[p]

    def validate(self, A: SpanComplex) -> list:
        """Keys outside the lattice or domain and values outside ``A``."""
        if callable(self.values):
            return []
        bad = []
        for p, v in self.values.items():
            if not all(self.lat.is_aligned(i, c) for i, c in enumerate(p)):
                bad.append(("off-lattice", p))
            elif self.domain is not None and not contains(self.domain, p):
                bad.append(("outside-domain", p))
            if not contains(A, v):
                bad.append(("value-outside", p))
        return bad


class ExtensionField:
    """The refined field down to lattice ``lat / 2**depth``, evaluated lazily.

    Points are addressed by integer keys ``k`` with point
    ``origin + steps * k / 2**depth``.
    """

    def __init__(self, seed: LatticeSample, A: SpanComplex, depth: int, memo: dict = None):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.seed = seed
        self.A = A
        self.depth = depth
        self.lat = seed.lat
        self.m = seed.lat.n
        self.n = A.dim
        self.scale = 1 << depth
        self._memo: dict = memo if memo is not None else {}

    # -- addressing -------------------------------------------------------
    def key_of(self, p) -> tuple:
        key = []
        for i, c in enumerate(p):
            t = (c - self.lat.origin[i]) / self.lat.steps[i] * self.scale
            t = exact(t)
            if t.denominator != 1:
                raise ValueError(f"{p} is not on the depth-{self.depth} grid")
            key.append(int(t))
        return tuple(key)

    def point_of(self, key) -> tuple:
        return tuple(
            o + Dyadic(s.mantissa * k, s.exponent + self.depth) for o, s, k in zip(self.lat.origin, self.lat.steps, key)
        )

    def level(self, key) -> int:
        tz = self.depth
        for k in key:
            if k:
                tz = min(tz, (k & -k).bit_length() - 1)
        return self.depth - tz

    def parent_vertices(self, key) -> tuple:
        """Vertices of the coarser face whose center is ``key`` (level >= 1)."""
        lvl = self.level(key)
        half = 1 << (self.depth - lvl)
        odd = [j for j, k in enumerate(key) if (k // half) & 1]
        out = []
        for signs in itertools.product((-1, 1), repeat=len(odd)):
            v = list(key)
            for j, s in zip(odd, signs):
                v[j] += s * half
            out.append(tuple(v))
        return lvl, out

    # -- evaluation -------------------------------------------------------
    def _canon(self, key) -> tuple:
        """Depth independent memo key: (level, key reduced to that level)."""
        lvl = self.level(key)
        sh = self.depth - lvl
        return (lvl,) + tuple(k >> sh for k in key)

    def value_at_key(self, key):
        ck = self._canon(key)
        hit = self._memo.get(ck)
        if hit is not None:
            return hit
        lvl = ck[0]
        if lvl == 0:
            val = as_point(self.seed(self.point_of(key)))
        else:
            _, verts = self.parent_vertices(key)
            images = [self.value_at_key(v) for v in verts]
            val = phi_r_i(images, rotation_axis(lvl, self.n), self.A)
        self._memo[ck] = val
        return val

    def __call__(self, p):
        return self.value_at_key(self.key_of(p))

    # -- eager views -------------------------------------------------------
    def domain_keys(self) -> list:
        """All depth grid keys inside the seed's domain, sorted."""
        dom = self.seed.domain
        if dom is None:
            raise ValueError("eager evaluation needs a domain")
        keys = set()
        for b in dom.boxes:
            ranges = []
            for i, iv in enumerate(b.intervals):
                lo = self.lat.floor_index(i, iv.lo) * self.scale
                hi = self.lat.ceil_index(i, iv.hi) * self.scale
                ranges.append(range(lo, hi + 1))
            keys.update(itertools.product(*ranges))
        return sorted(keys)

    def samples(self) -> dict:
        """Eagerly evaluated ``{point: value}`` over the domain, coarse levels first."""
        keys = sorted(self.domain_keys(), key=self.level)
        return {self.point_of(k): self.value_at_key(k) for k in keys}

    def refined(self) -> "ExtensionField":
        """The same field one level deeper; existing values are shared."""
        return ExtensionField(self.seed, self.A, self.depth + 1, self._memo)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{j}" for j in range(self.m)] + [f"f{i}" for i in range(self.n)] + ["level"])
        for k in sorted(self.domain_keys(), key=lambda k: (self.level(k), k)):
            p = self.point_of(k)
            w.writerow([to_text(c) for c in p] + [to_text(c) for c in self.value_at_key(k)] + [self.level(k)])
        return buf.getvalue()


def refine_once(field_: ExtensionField, A: SpanComplex = None) -> ExtensionField:
    if A is not None and A is not field_.A:
        return ExtensionField(field_.seed, A, field_.depth + 1)
    return field_.refined()


def extend(seed: LatticeSample, K: int, A: SpanComplex) -> ExtensionField:
    """Apply ``K`` refinement steps to ``seed``; values are computed on demand."""
    return ExtensionField(seed, A, K)


# ---------------------------------------------------------------------------
# dense diagnostics


@dataclass
class DenseField:
    """Values on a full box of depth grid keys, scaled to integers."""

    values: np.ndarray  # shape grid + (n,), integer (value * 2**exponent)
    present: np.ndarray  # shape grid, bool
    exponent: int
    origin_key: tuple
    depth: int

    @classmethod
    def of(cls, field_: ExtensionField) -> "DenseField":
        keys = field_.domain_keys()
        base = np.min(np.array(keys), axis=0)
        top = np.max(np.array(keys), axis=0)
        shape = tuple(int(t - b + 1) for b, t in zip(base, top))
        vals = {k: field_.value_at_key(k) for k in sorted(keys, key=field_.level)}
        e = max((Dyadic.of(c).exponent for v in vals.values() for c in v), default=0)
        big = max((abs(Dyadic.of(c).shift(e).mantissa) for v in vals.values() for c in v), default=0)
        dtype = np.int64 if big < 2**60 else object
        arr = np.zeros(shape + (field_.n,), dtype=dtype)
        present = np.zeros(shape, dtype=bool)
        for k, v in vals.items():
            idx = tuple(int(a - b) for a, b in zip(k, base))
            arr[idx] = [int(Dyadic.of(c).shift(e)) for c in v]
            present[idx] = True
        return cls(arr, present, e, tuple(int(b) for b in base), field_.depth)

    @property
    def m(self) -> int:
        return self.present.ndim


@dataclass
class PropertyReport:
    violations: list = field(default_factory=list)
    checked_faces: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _windows(arr, win, m):
    return sliding_window_view(arr, win, axis=tuple(range(m)))


def check_property_P(field_: ExtensionField, dense: DenseField = None) -> PropertyReport:
    """Every finer sample of a face lies in the b-hull of the face's vertex images."""
    dense = dense or DenseField.of(field_)
    m, K = dense.m, dense.depth
    report = PropertyReport()
    V, P = dense.values, dense.present
    for lvl in range(K):
        s = 1 << (K - lvl)
        for mask in itertools.product((0, 1), repeat=m):
            if not any(mask):
                continue
            win = tuple(s * e + 1 for e in mask)
            if any(w > d for w, d in zip(win, P.shape)):
                continue
            first = tuple((-b) % s for b in dense.origin_key)
            pos = tuple(slice(f, None, s) for f in first)
            Wp = _windows(P, win, m)[pos]
            ok_face = Wp.reshape(Wp.shape[:m] + (-1,)).all(axis=-1)
            Wv = _windows(V, win, m)[pos]  # grid..., n, window...
            flat = Wv.reshape(Wv.shape[: m + 1] + (-1,))
            vert_sel = tuple(slice(None, None, s) if e else slice(None) for e in mask)
            Vert = Wv[(Ellipsis,) + vert_sel]
            vflat = Vert.reshape(Vert.shape[: m + 1] + (-1,))
            lo_bad = flat.min(axis=-1) < vflat.min(axis=-1)
            hi_bad = flat.max(axis=-1) > vflat.max(axis=-1)
            bad = (lo_bad | hi_bad).any(axis=-1) & ok_face
            report.checked_faces += int(ok_face.sum())
            for idx in np.argwhere(bad):
                corner = tuple(int(dense.origin_key[j] + first[j] + idx[j] * s) for j in range(m))
                report.violations.append({"level": lvl, "corner_key": corner, "mask": mask})
    return report


@dataclass
class HolderRow:
    level: int
    axis_rotated: int
    max_M: list
    max_N: list
    halving_violations: int
    growth_violations: int


@dataclass
class HolderReport:
    rows: list
    exponent_estimates: list

    @property
    def halving_violations(self) -> int:
        return sum(r.halving_violations for r in self.rows)

    @property
    def growth_violations(self) -> int:
        return sum(r.growth_violations for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "rows": [r.__dict__ for r in self.rows],
            "exponent_estimates": self.exponent_estimates,
            "halving_violations": self.halving_violations,
            "growth_violations": self.growth_violations,
        }


def _spreads(dense: DenseField, lvl: int):
    """Per-axis vertex spread ``M_i`` of every level-``lvl`` full box, and presence."""
    m, s = dense.m, 1 << (dense.depth - lvl)
    first = tuple((-b) % s for b in dense.origin_key)
    pos = tuple(slice(f, None, s) for f in first)
    win = (s + 1,) * m
    if any(w > d for w, d in zip(win, dense.present.shape)):
        return None, None, first
    Wp = _windows(dense.present, win, m)[pos]
    vert = (Ellipsis,) + (slice(None, None, s),) * m
    okb = Wp[vert].reshape(Wp.shape[:m] + (-1,)).all(axis=-1)
    Wv = _windows(dense.values, win, m)[pos][vert]
    flat = Wv.reshape(Wv.shape[: m + 1] + (-1,))
    return flat.max(axis=-1) - flat.min(axis=-1), okb, first


def holder_report(field_: ExtensionField, dense: DenseField = None) -> HolderReport:
    """``M_i(R)`` and ``N_i(R)`` per level; halving on the rotation axis."""
    dense = dense or DenseField.of(field_)
    K, m, n = dense.depth, dense.m, field_.n
    if K < 1:
        raise ValueError("holder_report needs depth >= 1")
    rows = []
    maxM_by_level = []
    for lvl in range(K):
        M, ok, first = _spreads(dense, lvl)
        M2, ok2, first2 = _spreads(dense, lvl + 1)
        if M is None or not ok.any():
            break
        # level-(lvl+1) box corners inside level-lvl box at grid index g: 2g + {0,1}
        off = tuple((f - f2) // ((1 << (K - lvl - 1))) for f, f2 in zip(first, first2))
        N = np.full(M.shape, -1, dtype=M.dtype if M.dtype != object else object)
        for sub in itertools.product((0, 1), repeat=m):
            sel = []
            for j in range(m):
                start = off[j] + sub[j]
                sel.append(slice(start, start + 2 * M.shape[j], 2))
            part = M2[tuple(sel) + (slice(None),)]
            N = np.maximum(N, part)
        axis = rotation_axis(lvl + 1, n)
        okm = ok[..., None]
        halving = int(((2 * N[..., axis] > M[..., axis]) & ok).sum())
        growth = int(((N > M) & okm).sum())
        mm = [exact(Dyadic(int(M[..., i][ok].max()), dense.exponent)) for i in range(n)]
        nn = [exact(Dyadic(int(N[..., i][ok].max()), dense.exponent)) for i in range(n)]
        maxM_by_level.append(max(float(x) for x in mm))
        rows.append(HolderRow(lvl, axis, [to_text(x) for x in mm], [to_text(x) for x in nn], halving, growth))
    est = []
    for lvl in range(len(maxM_by_level) - n):
        a, b = maxM_by_level[lvl], maxM_by_level[lvl + n]
        if a > 0 and b > 0:
            est.append(math.log2(a / b) / n)
    return HolderReport(rows, est)


def random_seed(A: SpanComplex, m: int, rng, side: int = 1) -> LatticeSample:
    """Unit-lattice seed on ``[0, side]^m`` with values drawn from ``A``'s cell representatives."""
    arr = A.arrangement
    cells = arr.occupied_cells()
    values = {
        tuple(Dyadic(c) for c in v): arr.representative(rng.choice(cells))
        for v in itertools.product(range(side + 1), repeat=m)
    }
    domain = SpanComplex(m, (BoxRegion(tuple(Interval(Dyadic(0), Dyadic(side)) for _ in range(m))),))
    return LatticeSample(Lattice.cubic(m), values, domain)
