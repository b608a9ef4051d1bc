"""Acceptance criteria, each checked against independent references where one exists.

Every test records a one-line verdict printed in the terminal summary.
"""

import io
import json
import random
import sys
import time
from fractions import Fraction

from conftest import record
from oracles import SampleGrid, _raw_boxes, member, monotone_bfs

from monovex import cli
from monovex import examples as ex
from monovex.dyadic import Dyadic
from monovex.extension import (
    DenseField,
    check_property_P,
    extend,
    holder_report,
    random_seed,
)
from monovex.fuzz import FuzzConfig, draw_monovex, random_complex, run_fuzz
from monovex.geometry import Lattice
from monovex.homology import betti_numbers
from monovex.homotopy import (
    audit_points,
    build_g_delta,
    cantor_homotopy,
    cantor_schedule,
)
from monovex.paths import is_monovex, monotone_reachable, validate_monotone
from monovex.raster import to_complex
from monovex.retraction import RetractionContext, exterior_points, iterate_retraction

QUARTER = Dyadic(1, 2)


def cheb(p, q):
    return max(abs(Fraction(a) - Fraction(b)) for a, b in zip(p, q))


def box_gap(p, lo, hi):
    """Chebyshev distance from ``p`` to the closed box ``[lo, hi]``."""
    return max(max(Fraction(l) - Fraction(c), Fraction(c) - Fraction(h), Fraction(0)) for c, l, h in zip(p, lo, hi))


def dist_to_union(p, raw):
    return min(box_gap(p, [b[i][0] for i in range(len(p))], [b[i][1] for i in range(len(p))]) for b in raw)


def cli_json(monkeypatch, capsys, argv, stdin):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_1_example1_monovex_and_acyclic(monkeypatch, capsys):
    t = time.perf_counter()
    _, doc = cli_json(monkeypatch, capsys, ["examples", "example1", "--K", "3"], "")
    code_c, out_c = cli_json(monkeypatch, capsys, ["check"], doc)
    code_b, out_b = cli_json(monkeypatch, capsys, ["betti"], doc)
    dt = time.perf_counter() - t
    verdict, betti = json.loads(out_c)["is_monovex"], json.loads(out_b)["betti"]
    ok = code_c == code_b == 0 and verdict is True and betti == [1, 0] and dt < 5
    record(1, ok, dt, f"is_monovex={verdict} betti={betti}")
    assert ok


def test_2_example2_and_its_closed_surrogate():
    t = time.perf_counter()
    exact = is_monovex(ex.example2()).is_monovex
    A_eps = ex.example2_closed(QUARTER)
    rep = is_monovex(A_eps)
    x, y = rep.witness
    lib_none = monotone_reachable(A_eps, x, y) is None
    grid_none = not monotone_bfs(SampleGrid(A_eps), x, y)
    b1 = betti_numbers(A_eps, Lattice.cubic(3, QUARTER))[1]
    dt = time.perf_counter() - t
    ok = exact and not rep.is_monovex and lib_none and grid_none and b1 == 1 and dt < 60
    record(2, ok, dt, f"exact={exact} surrogate={rep.is_monovex} witness unreachable={lib_none and grid_none} b1={b1}")
    assert ok


def test_3_example3_raster_not_monovex():
    t = time.perf_counter()
    c = to_complex(ex.example3(Dyadic(1, 3)))
    path = monotone_reachable(c, (0, 0, 0), (0, 0, 4))
    dt = time.perf_counter() - t
    ok = path is None and dt < 30
    record(3, ok, dt, f"path (0,0,0)->(0,0,4) = {path}")
    assert ok


def test_4_example4_raster_has_a_loop():
    t = time.perf_counter()
    b = betti_numbers(to_complex(ex.example4(Dyadic(1, 4), T=1)))
    dt = time.perf_counter() - t
    ok = b[1] == 1 and dt < 120
    record(4, ok, dt, f"betti={b}")
    assert ok


def test_5_grid_extension_property_p_and_halving():
    t = time.perf_counter()
    p_bad = halving_bad = growth_bad = range_bad = 0
    for i in range(20):
        rng = random.Random(f"ext:{i}")
        n = 1 + i % 3
        A, _ = draw_monovex(rng, n, FuzzConfig(n=n, max_boxes=5, span=4))
        f = extend(random_seed(A, 2, rng, side=2), 6, A)
        dense = DenseField.of(f)
        raw = _raw_boxes(A)
        range_bad += sum(not member(raw, v) for v in f.samples().values())
        p_bad += len(check_property_P(f, dense).violations)
        rep = holder_report(f, dense)
        halving_bad += rep.halving_violations
        growth_bad += rep.growth_violations
    dt = time.perf_counter() - t
    ok = p_bad == halving_bad == growth_bad == range_bad == 0 and dt < 60
    record(5, ok, dt, f"P={p_bad} halving={halving_bad} growth={growth_bad} range={range_bad}")
    assert ok


def test_6_path_field_bounds():
    t = time.perf_counter()
    A = ex.example1(3)
    raw = _raw_boxes(A)
    depth = 4
    ts = [Fraction(j, 1 << depth) for j in range((1 << depth) + 1)]
    worst = {}
    bad = 0
    for delta in (Dyadic(1, 1), QUARTER):
        g = build_g_delta(A, delta, depth)
        xs = audit_points(A, delta / 2)
        d = Fraction(delta)
        gaps = [Fraction(0)] * 3
        for x in xs:
            for y in xs:
                lo = [min(a, b) for a, b in zip(x, y)]
                hi = [max(a, b) for a, b in zip(x, y)]
                for s in ts:
                    v = g(x, y, s)
                    bad += not member(raw, v)
                    gaps[2] = max(gaps[2], box_gap(v, lo, hi))
                gaps[0] = max(gaps[0], cheb(x, g(x, y, 0)))
                gaps[1] = max(gaps[1], cheb(y, g(x, y, 1)))
        bad += sum(gap > d for gap in gaps)
        worst[str(d)] = [str(gap) for gap in gaps]
    dt = time.perf_counter() - t
    ok = bad == 0 and dt < 60
    record(6, ok, dt, f"max (start, end, hull) gaps per delta: {worst}")
    assert ok


def _parents(levels, k, s, s2):
    """Nearest endpoints of coarser levels (or 0, 1) enclosing a level-``k`` interval."""
    coarse = {Fraction(0), Fraction(1)}
    for ivs in levels[: k - 1]:
        for a, b in ivs:
            coarse.update((a, b))
    return max(c for c in coarse if c < s), min(c for c in coarse if c > s2)


def test_7_cantor_homotopy_slices_and_junctions():
    t = time.perf_counter()
    A, x0, delta0 = ex.example1(3), (Dyadic(1), Dyadic(1)), QUARTER
    sched = cantor_schedule(3, delta0)
    H = cantor_homotopy(A, x0, sched, depth=2)
    xs = sorted({x for x, _ in H.samples})
    start_ok = all(H.samples[(x, Fraction(0))] == x for x in xs)
    end_ok = all(H.samples[(x, Fraction(1))] == x0 for x in xs)
    sched_ok = list(sched.deltas) == [delta0.shift(-k) for k in (1, 2, 3)]
    bad = checked = 0
    for k, ivs in enumerate(sched.levels, start=1):
        bound = Fraction(delta0) / 2**k
        for s, s2 in ivs:
            tl, tr = _parents(sched.levels, k, s, s2)
            for x in xs:
                checked += 2
                bad += cheb(H.samples[(x, s)], H.samples[(x, tl)]) > bound
                bad += cheb(H.samples[(x, s2)], H.samples[(x, tr)]) > bound
    dt = time.perf_counter() - t
    ok = start_ok and end_ok and sched_ok and bad == 0 and checked > 0
    record(7, ok, dt, f"t0 identity={start_ok} t1 constant={end_ok} junction violations={bad}/{checked}")
    assert ok


def test_8_retraction_decay():
    t = time.perf_counter()
    A = ex.example1(3)
    raw = _raw_boxes(A)
    xs = exterior_points(A, 50, random.Random("accept:8"))
    ctx = RetractionContext(A, xs)
    decay_bad = step_bad = 0
    for x in xs:
        traj = iterate_retraction(A, x, 4, ctx, strict=False)
        d0 = dist_to_union(x, raw)
        prev = x
        for k, point in enumerate(traj.points, start=1):
            decay_bad += dist_to_union(point, raw) > d0 / 9**k
            step_bad += cheb(point, prev) > Fraction(4, 3) * dist_to_union(prev, raw)
            prev = point
    dt = time.perf_counter() - t
    ok = decay_bad == step_bad == 0 and dt < 60
    record(8, ok, dt, f"decay violations={decay_bad} step violations={step_bad} over {len(xs)} points")
    assert ok


def test_9_monovex_implies_acyclic():
    t = time.perf_counter()
    mixed = run_fuzz(FuzzConfig(seed=0, n=3, mode="closed", trials=100))
    planar = run_fuzz(FuzzConfig(seed=1, n=2, mode="closed", trials=100))
    dt = time.perf_counter() - t
    counts = [mixed["counts"], planar["counts"]]
    dims = sorted({r["n"] for r in mixed["trials"]})
    ok = all(c["ok"] == 100 and c["violation"] == 0 for c in counts) and dt < 300
    record(9, ok, dt, f"n<=3: {counts[0]} dims={dims}; n=2: {counts[1]}")
    assert ok


def test_10_reachability_matches_grid_bfs():
    t = time.perf_counter()
    rng = random.Random("accept:10")
    modes = ("closed", "open", "half-open")
    disagree = reachable = done = 0
    while done < 200:
        n = rng.randint(1, 3)
        c = random_complex(rng, n, rng.randint(2, 6), rng.choice(modes), span=4)
        grid = SampleGrid(c)
        raw = _raw_boxes(c)
        i, j = rng.sample(range(len(raw)), 2)
        in_i = [p for p in grid.points() if member([raw[i]], grid.point(p))]
        in_j = [p for p in grid.points() if member([raw[j]], grid.point(p))]
        if not in_i or not in_j:
            continue
        x, y = grid.point(rng.choice(in_i)), grid.point(rng.choice(in_j))
        path = monotone_reachable(c, x, y)
        expect = monotone_bfs(grid, x, y)
        if path is not None and not validate_monotone(path, c):
            disagree += 1
        disagree += (path is not None) != expect
        reachable += expect
        done += 1
    dt = time.perf_counter() - t
    ok = disagree == 0
    record(10, ok, dt, f"disagreements={disagree}/200 (reachable {reachable})")
    assert ok
