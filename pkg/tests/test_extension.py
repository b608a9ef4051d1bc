import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import halving_violations, property_p_violations

from monovex import examples as ex
from monovex.dyadic import Dyadic
from monovex.extension import (
    DenseField,
    ExtensionField,
    LatticeSample,
    NoMonotonePath,
    check_property_P,
    extend,
    holder_report,
    phi_r_i,
    random_seed,
    refine_once,
    rotation_axis,
)
from monovex.fuzz import FuzzConfig, draw_monovex
from monovex.geometry import Lattice, SpanComplex, box, contains

HALF = Dyadic(1, 1)
UNIT = SpanComplex.of(box((0, 1)))
SQUARE = SpanComplex.of(box((0, 1), (0, 1)))


def seed_1d(v0, v1, A=UNIT):
    return LatticeSample(Lattice.cubic(1), {(Dyadic(0),): (v0,), (Dyadic(1),): (v1,)}, SpanComplex.of(box((0, 1))))


def test_rotation_axis_cycles():
    assert [rotation_axis(k, 3) for k in range(1, 7)] == [0, 1, 2, 0, 1, 2]


def test_phi_examples():
    q = phi_r_i([(0, 0), (1, 1)], 0, SQUARE)
    assert q[0] == HALF and contains(SQUARE, q)
    p = (HALF, Dyadic(1, 2))
    assert phi_r_i([p, p, p], 1, SQUARE) == p
    q = phi_r_i([(2, 0), (0, 2)], 0, ex.lshape())
    assert q[0] == 1 and contains(ex.lshape(), q)


def test_phi_reports_missing_path():
    with pytest.raises(NoMonotonePath):
        phi_r_i([(HALF, HALF), (HALF, Dyadic(5, 1))], 1, ex.sshape())


def test_phi_tie_break_uses_first_index():
    # both (0, 1) and (0, 0) attain the minimum on axis 0; the first one is used
    q = phi_r_i([(0, 1), (0, 0), (1, 1)], 0, SQUARE)
    assert q[0] == HALF and q[1] == 1


def test_refine_examples_one_dimensional():
    f = refine_once(extend(seed_1d(HALF, HALF), 0, UNIT))
    assert f((HALF,)) == (HALF,)
    f = refine_once(extend(seed_1d(0, 1), 0, UNIT))
    assert f((HALF,)) == (HALF,)


def test_refine_keeps_old_values():
    seed = random_seed(ex.example1(3), 2, random.Random(3))
    coarse = extend(seed, 2, ex.example1(3))
    fine = refine_once(coarse)
    for p, v in coarse.samples().items():
        assert fine(p) == v


def test_example1_level_one_passes_property_p():
    A = ex.example1(3)
    corners = {(Dyadic(a), Dyadic(b)): (1, 1) if a == b else (HALF, HALF) for a in (0, 1) for b in (0, 1)}
    seed = LatticeSample(Lattice.cubic(2), corners, SQUARE)
    assert check_property_P(extend(seed, 1, A)).ok


def test_depth_zero_is_the_seed():
    seed = random_seed(ex.example1(3), 2, random.Random(0))
    f = extend(seed, 0, ex.example1(3))
    assert f.samples() == dict(seed.values)


def test_constant_seed_stays_constant():
    A = ex.example1(3)
    p = (Dyadic(3, 2), Dyadic(3, 2))
    seed = LatticeSample(Lattice.cubic(2), lambda q: p, SQUARE)
    f = extend(seed, 3, A)
    assert set(f.samples().values()) == {p}
    assert check_property_P(f).ok
    rep = holder_report(f)
    assert all(x == "0" for row in rep.rows for x in row.max_M + row.max_N)


def test_linear_seed_in_cube():
    cube = SpanComplex.of(box((0, 1), (0, 1)))
    seed = LatticeSample(Lattice.cubic(2), lambda q: q, SQUARE)
    f = extend(seed, 4, cube)
    assert check_property_P(f).ok


def test_corrupted_midpoint_is_flagged_once():
    A = SpanComplex.of(box((0, 4)))
    seed = seed_1d(0, 1, A)
    # the level-1 midpoint 1/2 has canonical memo key (1, 1)
    f = ExtensionField(seed, A, 1, memo={(1, 1): (Dyadic(3),)})
    report = check_property_P(f)
    assert len(report.violations) == 1
    assert property_p_violations(f.samples(), 1, 1, 1) == 1


def test_linear_one_dimensional_holder_exponent_one():
    f = extend(seed_1d(0, 1), 6, UNIT)
    rep = holder_report(f)
    assert rep.halving_violations == 0 and rep.growth_violations == 0
    assert all(e == pytest.approx(1.0) for e in rep.exponent_estimates)
    spreads = [Dyadic.parse(r.max_M[0]) for r in rep.rows]
    assert spreads == [Dyadic(1, k) for k in range(6)]


def test_holder_needs_depth():
    with pytest.raises(ValueError):
        holder_report(extend(seed_1d(0, 1), 0, UNIT))


def test_example1_depth6_holder_table():
    A = ex.example1(3)
    f = extend(random_seed(A, 2, random.Random(11)), 6, A)
    dense = DenseField.of(f)
    assert check_property_P(f, dense).ok
    rep = holder_report(f, dense)
    assert rep.halving_violations == 0 and rep.growth_violations == 0


def test_lattice_sample_validate():
    seed = LatticeSample(Lattice.cubic(1), {(Dyadic(0),): (HALF,), (HALF,): (Dyadic(5),)}, UNIT)
    kinds = {k for k, _ in seed.validate(UNIT)}
    assert kinds == {"off-lattice", "value-outside"}


def test_csv_export_has_one_row_per_sample():
    f = extend(seed_1d(0, 1), 2, UNIT)
    lines = f.to_csv().strip().splitlines()
    assert lines[0] == "x0,f0,level" and len(lines) == 1 + 5


# -- properties ---------------------------------------------------------------


@st.composite
def monovex_seeded(draw, max_depth=3):
    s = draw(st.integers(0, 10**9))
    rng = random.Random(s)
    n = rng.randint(1, 3)
    A, _ = draw_monovex(rng, n, FuzzConfig(n=n, max_boxes=5, span=4))
    m = draw(st.integers(1, 2))
    side = draw(st.integers(1, 2))
    return A, random_seed(A, m, rng, side=side), m, side, draw(st.integers(1, max_depth))


@settings(max_examples=30)
@given(monovex_seeded())
def test_property_p_and_halving_match_oracles(data):
    A, seed, m, side, depth = data
    f = extend(seed, depth, A)
    samples = f.samples()
    assert all(contains(A, v) for v in samples.values())
    dense = DenseField.of(f)
    assert len(check_property_P(f, dense).violations) == property_p_violations(samples, side, m, depth) == 0
    rep = holder_report(f, dense)
    assert (rep.halving_violations, rep.growth_violations) == halving_violations(samples, side, m, A.dim, depth)
    assert rep.halving_violations == rep.growth_violations == 0


@settings(max_examples=30)
@given(monovex_seeded(max_depth=4), st.data())
def test_value_stability_across_depths(data, more):
    A, seed, m, side, depth = data
    k = more.draw(st.integers(0, depth))
    deep = extend(seed, depth, A)
    shallow = extend(seed, k, A)
    for p, v in shallow.samples().items():
        assert deep(p) == v
