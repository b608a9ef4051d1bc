import itertools

import pytest
from conftest import complexes
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import euler_counts, union_find_components

from monovex import examples as ex
from monovex.dyadic import Dyadic
from monovex.geometry import Lattice, SpanComplex, box
from monovex.homology import (
    BoundaryError,
    CubicalComplex,
    betti_numbers,
    coordinate_unit,
    cycle_to_off,
    poset_betti,
    reduce_ranks,
)

QUARTER = Dyadic(1, 2)
ANNULUS = [v for v in itertools.product(range(3), repeat=2) if v != (1, 1)]


def test_unit_square_cells():
    cc = CubicalComplex.from_complex(SpanComplex.of(box((0, 1), (0, 1))), Lattice.cubic(2))
    assert (cc.count(0), cc.count(1), cc.count(2)) == (4, 4, 1)


def test_example1_euler_characteristic():
    cc = CubicalComplex.from_complex(ex.example1(2), Lattice.cubic(2, QUARTER))
    # hand count: 3x3 grid (9 V, 12 E, 4 F) and 2x2 grid (4 V, 4 E, 1 F) sharing one vertex
    assert (cc.count(0), cc.count(1), cc.count(2)) == (12, 16, 5)
    assert cc.euler_characteristic() == 1
    cc.check_boundary_squared()


def test_misaligned_or_open_input_rejected():
    with pytest.raises(ValueError):
        CubicalComplex.from_complex(SpanComplex.of(box((0, Dyadic(1, 1)))), Lattice.cubic(1))
    with pytest.raises(ValueError):
        CubicalComplex.from_complex(ex.example2(), Lattice.cubic(3))


def test_solid_cube():
    assert betti_numbers(SpanComplex.of(box((0, 1), (0, 1), (0, 1)))) == (1, 0, 0, 0)


def test_square_annulus():
    cc = CubicalComplex.from_voxels(ANNULUS, 2)
    assert (cc.count(0), cc.count(1), cc.count(2)) == (16, 24, 8)
    assert cc.euler_characteristic() == 0
    assert cc.betti_numbers() == (1, 1, 0)
    loop = cc.one_cycle()
    assert loop is not None and _encloses(loop, (3, 3))  # hole centre in doubled coordinates
    off = cycle_to_off(loop, cc.coords).splitlines()
    assert off[0] == "OFF" and off[1] == f"{len(loop)} 1 0"


def _encloses(loop, c):
    """Even-odd ray cast from ``c`` along +x against the closed polygon ``loop``."""
    inside = False
    for (x0, y0), (x1, y1) in zip(loop, loop[1:] + loop[:1]):
        if (y0 > c[1]) != (y1 > c[1]) and c[0] < x0 + (c[1] - y0) * (x1 - x0) / (y1 - y0):
            inside = not inside
    return inside


def test_contractible_has_no_cycle():
    assert CubicalComplex.from_voxels([(0, 0), (1, 0)], 2).one_cycle() is None


def test_example2_surrogate_and_half_open_set():
    assert betti_numbers(ex.example2_closed(QUARTER)) == (1, 1, 0, 0)
    assert poset_betti(ex.example2()) == (1, 1, 0, 0)


@pytest.mark.parametrize("eps", [Dyadic(1, 3), Dyadic(1, 2), Dyadic(1, 1)])
def test_surrogate_is_stable_in_eps(eps):
    assert betti_numbers(ex.example2_closed(eps))[1] == 1


def test_hollow_cube_has_beta2():
    shell = [v for v in itertools.product(range(3), repeat=3) if v != (1, 1, 1)]
    assert CubicalComplex.from_voxels(shell, 3).betti_numbers() == (1, 0, 1, 0)


def test_inconsistent_boundary_is_detected():
    # an edge whose endpoint vertex is missing violates face closure
    broken = CubicalComplex(1, {0: [(0,)], 1: [(1,)]})
    with pytest.raises((BoundaryError, KeyError, ValueError)):
        broken.betti_numbers()


def test_reduce_ranks_small():
    # boundary of a triangle: 3 edges on 3 vertices, rank 2
    ranks, _ = reduce_ranks({1: [0b011, 0b110, 0b101]})
    assert ranks[1] == 2


def test_coordinate_unit():
    assert coordinate_unit(ex.example1(3)) == Dyadic(1, 3)
    assert coordinate_unit(SpanComplex.of(box((0, 2)))) == 1


# -- properties ----------------------------------------------------------------

voxel_sets = st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=16)


def _voxel_neighbours(v):
    """Closed unit squares touching v (sharing a vertex or edge)."""
    for d in itertools.product((-1, 0, 1), repeat=2):
        if any(d):
            yield (v[0] + d[0], v[1] + d[1])


@given(voxel_sets)
def test_planar_betti_matches_independent_counts(vox):
    cc = CubicalComplex.from_voxels(vox, 2)
    b = cc.betti_numbers()
    b0 = union_find_components(vox, _voxel_neighbours)
    chi = euler_counts([((x, x + 1), (y, y + 1)) for x, y in vox], 2)
    assert cc.euler_characteristic() == chi
    assert b == (b0, b0 - chi, 0)


@given(st.sets(st.tuples(*[st.integers(0, 3)] * 3), min_size=1, max_size=20))
def test_boundary_squared_and_euler(vox):
    cc = CubicalComplex.from_voxels(vox, 3)
    cc.check_boundary_squared()
    b = cc.betti_numbers()
    assert sum((-1) ** k * x for k, x in enumerate(b)) == cc.euler_characteristic()
    chi = euler_counts([tuple((c, c + 1) for c in v) for v in vox], 3)
    assert cc.euler_characteristic() == chi


@given(voxel_sets)
def test_disjoint_union_is_additive(vox):
    shifted = {(x + 10, y) for x, y in vox}
    one = CubicalComplex.from_voxels(vox, 2).betti_numbers()
    two = CubicalComplex.from_voxels(set(vox) | shifted, 2).betti_numbers()
    assert two == tuple(2 * b for b in one)


@settings(max_examples=40)
@given(complexes(max_boxes=3, span=4))
def test_cubical_and_order_complex_agree_on_closed_sets(c):
    assert betti_numbers(c) == poset_betti(c)
