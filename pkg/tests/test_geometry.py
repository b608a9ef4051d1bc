import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from conftest import complexes
from hypothesis import given
from hypothesis import strategies as st
from oracles import _raw_boxes, member

from monovex import examples as ex
from monovex.dyadic import Dyadic
from monovex.geometry import (
    BoxRegion,
    DimensionMismatch,
    Interval,
    Lattice,
    SpanComplex,
    arrangement_cells,
    bhull,
    box,
    cheb_distance,
    contains,
    elementary_boxes,
    intersect_box,
    is_subset,
    minkowski_box,
    project,
)
from monovex.paths import is_monovex

H = Dyadic(1, 1)


def test_interval_rejects_empty():
    with pytest.raises(ValueError):
        Interval(1, 0)
    with pytest.raises(ValueError):
        Interval(1, 1, True, False)


def test_box_dimension_and_vertices():
    b = box((0, 1), 2, (0, 1))
    assert b.dimension == 2
    assert len(b.vertices()) == 4


def test_contains_examples():
    assert contains(SpanComplex.of(box((0, 1), (0, 1))), (0, 0))
    half_open = SpanComplex.of(BoxRegion((Interval(-1, 0, True, False), Interval(0, 2))))
    assert not contains(half_open, (0, 1))
    assert contains(ex.example2(), (-1, 1, 1))


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        contains(SpanComplex.of(box((0, 1))), (0, 0))


@pytest.mark.parametrize(
    "p, A, d",
    [
        ((2, 0), SpanComplex.of(box((0, 1), (0, 1))), 1),
        ((3, 4), SpanComplex.of(box(1, 1)), 3),
        ((2, 2), SpanComplex.of(box((0, 1), (0, 3))), 1),
    ],
)
def test_cheb_distance_examples(p, A, d):
    assert cheb_distance(p, A) == (d, True)


def test_cheb_distance_open_facet_flag():
    A = SpanComplex.of(BoxRegion((Interval(0, 1, True, False),)))
    assert cheb_distance((2,), A) == (1, False)
    with pytest.raises(ValueError):
        cheb_distance((0,), SpanComplex(1))


def test_bhull_examples():
    assert bhull([(0, 0), (1, 2)]) == box((0, 1), (0, 2))
    assert bhull([(1, 1)]) == box(1, 1)
    assert bhull(box((0, 1), (0, 1), (0, 1)).vertices()) == box((0, 1), (0, 1), (0, 1))
    with pytest.raises(ValueError):
        bhull([])


def test_project_examples():
    assert project(SpanComplex.of(box((0, 1), (2, 3))), [0]).boxes == (box((0, 1)),)
    proj = project(ex.lshape(), [1])
    assert is_subset(proj, SpanComplex.of(box((0, 2)))) and is_subset(SpanComplex.of(box((0, 2))), proj)
    with pytest.raises(ValueError):
        project(ex.lshape(), [])


def test_minkowski_examples():
    sq = SpanComplex.of(box((0, 1), (0, 1)))
    assert minkowski_box(sq, box((0, 1), (0, 1))).boxes == (box((0, 2), (0, 2)),)
    half = BoxRegion((Interval(0, 1, True, False),) * 2)
    got = minkowski_box(SpanComplex.of(box(1, 1)), half)
    assert got.boxes == (BoxRegion((Interval(1, 2, True, False),) * 2),)
    with pytest.raises(DimensionMismatch):
        minkowski_box(sq, box((0, 1)))


def test_minkowski_of_axis_staircase_is_monovex():
    staircase = SpanComplex.of(box((0, 1), 0, 0), box(1, (0, 1), 0), box(1, 1, (0, 1)))
    h = Dyadic(1, 3)
    thick = minkowski_box(staircase, box((-h, h), (-h, h), (-h, h)))
    assert is_monovex(thick).is_monovex


def test_intersect_examples():
    got = intersect_box(SpanComplex.of(box((0, 2), (0, 2))), box((1, 3), (1, 3)))
    assert got.boxes == (box((1, 2), (1, 2)),)
    a = SpanComplex.of(BoxRegion((Interval(0, 1, True, False),)))
    assert intersect_box(a, box((1, 2))).is_empty


def test_arrangement_examples():
    assert len(arrangement_cells(SpanComplex.of(box((0, 1))))) == 3
    assert len(arrangement_cells(SpanComplex.of(box((0, 1)), box((1, 2))))) == 5


def _endpoint_grid_count(A):
    """Cells of the endpoint arrangement lying in A, counted by brute force."""
    boxes = _raw_boxes(A)
    axes = []
    for i in range(A.dim):
        ends = sorted({b[i][0] for b in boxes} | {b[i][1] for b in boxes})
        reps = list(ends) + [(a + b) / 2 for a, b in zip(ends, ends[1:])]
        axes.append(reps)
    return sum(member(boxes, p) for p in itertools.product(*axes))


def test_arrangement_count_example1():
    A = ex.example1(2)
    assert len(arrangement_cells(A)) == _endpoint_grid_count(A) == 9 + 9 - 1


def test_elementary_boxes_examples():
    w = box((0, 1), (0, 1))
    assert elementary_boxes(Lattice.cubic(2), 2, w) == [w]
    assert sorted(elementary_boxes(Lattice.cubic(2), 0, w), key=str) == sorted(
        (box(a, b) for a in (0, 1) for b in (0, 1)), key=str
    )
    assert elementary_boxes(Lattice.cubic(1, H), 1, box((0, 1))) == [box((0, H)), box((H, 1))]


@given(complexes(mode="half-open", max_boxes=4))
def test_round_trip_is_bit_exact(c):
    text = json.dumps(c.to_dict(), sort_keys=True)
    back = SpanComplex.from_dict(json.loads(text))
    assert back == c
    assert json.dumps(back.to_dict(), sort_keys=True) == text


@st.composite
def complex_and_probes(draw):
    c = draw(complexes(mode=draw(st.sampled_from(["closed", "half-open", "open"]))))
    probes = draw(st.lists(st.tuples(*[st.integers(-2, 14) for _ in range(c.dim)]), min_size=1, max_size=30))
    return c, [tuple(Fraction(k, 4) for k in p) for p in probes]


@given(complex_and_probes())
def test_arrangement_is_a_partition(data):
    c, probes = data
    cells = arrangement_cells(c)
    raw = _raw_boxes(c)
    for p in probes:
        hits = sum(p in b for b in cells)
        assert hits == (1 if member(raw, p) else 0)


@given(complex_and_probes(), st.data())
def test_intersect_with_hull_keeps_points(data, draw):
    c, probes = data
    raw = _raw_boxes(c)
    inside = [p for p in probes if member(raw, p)]
    if not inside:
        return
    pts = draw.draw(st.lists(st.sampled_from(inside), min_size=1, max_size=3))
    hull = bhull(pts)
    cut = intersect_box(c, hull)
    for p in inside:
        if p in hull:
            assert contains(cut, p)


def _interval_meets(lo1, hi1, c1l, c1h, lo2, hi2, c2l, c2h):
    """Vectorized: do two intervals with closedness flags intersect?"""
    lo = np.maximum(lo1, lo2)
    hi = np.minimum(hi1, hi2)
    lo_c = np.where(lo1 > lo2, c1l, np.where(lo1 < lo2, c2l, c1l & c2l))
    hi_c = np.where(hi1 < hi2, c1h, np.where(hi1 > hi2, c2h, c1h & c2h))
    return (lo < hi) | ((lo == hi) & lo_c & hi_c)


def test_minkowski_membership_million_probes():
    np_rng = np.random.default_rng(7)
    A = SpanComplex.of(
        BoxRegion((Interval(0, 1, True, False), Interval(0, 2))),
        BoxRegion((Interval(1, 3, False, True), Interval(Dyadic(1, 1), 1, False, True))),
        box(2, (0, 3)),
    )
    R = BoxRegion((Interval(0, Dyadic(1, 1), False, True), Interval(-1, 0, True, False)))
    S = minkowski_box(A, R)
    scale = 8
    probes = np_rng.integers(-2 * scale, 5 * scale, size=(1_000_000, 2))

    def scaled(v):
        return int(Fraction(v) * scale)

    got = np.zeros(len(probes), dtype=bool)
    for b in S.boxes:
        inside = np.ones(len(probes), dtype=bool)
        for i, iv in enumerate(b.intervals):
            lo, hi = scaled(iv.lo), scaled(iv.hi)
            x = probes[:, i]
            inside &= ((x > lo) | ((x == lo) & iv.lo_closed)) & ((x < hi) | ((x == hi) & iv.hi_closed))
        got |= inside
    # p in A + R  iff  some box b of A meets p - R on every axis
    want = np.zeros(len(probes), dtype=bool)
    for b in A.boxes:
        ok = np.ones(len(probes), dtype=bool)
        for i, (iv, r) in enumerate(zip(b.intervals, R.intervals)):
            x = probes[:, i]
            ok &= _interval_meets(
                scaled(iv.lo), scaled(iv.hi), iv.lo_closed, iv.hi_closed,
                x - scaled(r.hi), x - scaled(r.lo), r.hi_closed, r.lo_closed,
            )
        want |= ok
    assert np.array_equal(got, want)
    assert 0 < want.sum() < len(probes)
