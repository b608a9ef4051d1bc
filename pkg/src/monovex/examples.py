"""Named test complexes used by the CLI, the tests and the scripts."""

from __future__ import annotations

import itertools

from .dyadic import Dyadic
from .geometry import BoxRegion, Interval, SpanComplex, box
from .raster import SegmentSet, VoxelGrid, rasterize_minkowski, to_complex


def lshape() -> SpanComplex:
    """Two unit-wide arms meeting in the unit square at the origin."""
    return SpanComplex.of(box((0, 2), (0, 1)), box((0, 1), (0, 2)))


def sshape() -> SpanComplex:
    """Two horizontal bars joined on the right; the slice ``x = 1/2`` is disconnected."""
    return SpanComplex.of(box((0, 3), (0, 1)), box((2, 3), (1, 2)), box((0, 3), (2, 3)))


def example1(K: int = 3) -> SpanComplex:
    """Dyadic squares accumulating at the (omitted) origin."""
    boxes = []
    for k in range(K):
        lo, hi = Dyadic(1, k + 1), Dyadic(1, k)
        boxes.append(box((lo, hi), (lo, hi)))
    # consecutive squares share only a corner
    return SpanComplex.of(*boxes)


def example2() -> SpanComplex:
    """Six half-open boxes of the cube ``[-1,1]^3`` minus two opposite octants.

    Each box fixes one axis ``i`` to ``[-1, 0)`` and another ``j`` to
    ``[0, 1]``; the third axis is free.
    """
    neg = Interval(Dyadic(-1), Dyadic(0), True, False)
    nonneg = Interval(Dyadic(0), Dyadic(1))
    full = Interval(Dyadic(-1), Dyadic(1))
    boxes = []
    for i, j in itertools.permutations(range(3), 2):
        ivs = [full] * 3
        ivs[i] = neg
        ivs[j] = nonneg
        boxes.append(BoxRegion(tuple(ivs)))
    return SpanComplex.of(*boxes)


def example2_closed(eps=Dyadic(1, 4), h=None) -> SpanComplex:
    """Closed surrogate: ``[-1, -eps]`` on axis ``i``, ``[0, 1]`` on axis ``j``.

    ``h`` (optional) is the voxel size the surrogate must be aligned with.
    """
    eps = Dyadic.of(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if h is not None and (Dyadic.of(eps) / Dyadic.of(h)).denominator != 1:
        raise ValueError("eps must be a multiple of the voxel size")
    boxes = []
    for i, j in itertools.permutations(range(3), 2):
        ivs = [(-1, 1)] * 3
        ivs[i] = (-1, -eps)
        ivs[j] = (0, 1)
        boxes.append(box(*ivs))
    return SpanComplex.of(*boxes)


def example3_sets() -> tuple:
    a = SegmentSet.polyline((0, 0, 0), (0, 1, 1), (1, 1, 2))
    b = SegmentSet((((0, 0, 0), (-1, -1, 2)),))
    return a, b


def example3(h=Dyadic(1, 3)) -> VoxelGrid:
    """Voxel cover of a Minkowski sum of two monotone curves that is not monovex."""
    a, b = example3_sets()
    return rasterize_minkowski(a, b, h)


def example4_sets(T=1) -> tuple:
    T = Dyadic.of(T)
    a = SegmentSet.polyline((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1))
    b = SegmentSet((((-T, -T, -T), (T, T, T)),))
    return a, b


def example4(h=Dyadic(1, 4), T=1) -> VoxelGrid:
    """Axis staircase plus a truncated diagonal line.

    Both staircase ends lie on one diagonal, so the sum closes into a loop.
    """
    a, b = example4_sets(T)
    return rasterize_minkowski(a, b, h)


CATALOG = {
    "lshape": lambda **kw: lshape(),
    "sshape": lambda **kw: sshape(),
    "example1": lambda **kw: example1(kw.get("K", 3)),
    "example2": lambda **kw: example2(),
    "example2_closed": lambda **kw: example2_closed(kw.get("eps", Dyadic(1, 4)), kw.get("h")),
    "example3": lambda **kw: to_complex(example3(kw.get("h", Dyadic(1, 3)))),
    "example4": lambda **kw: to_complex(example4(kw.get("h", Dyadic(1, 4)), kw.get("T", 1))),
}
