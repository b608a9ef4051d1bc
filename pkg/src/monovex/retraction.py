"""Sampled retraction onto a closed monovex complex.

For a point ``x`` outside ``A`` the nearest-point set ``F(x)`` is thickened
to the union ``F1(x)`` of ``eta(x)``-lattice boxes meeting it, inflated by
open ``eta``-boxes and merged over nearby sample points into the open set
``G(x)``.  The map ``g`` picks a point of ``G(x)`` coordinate by
coordinate (midpoint of the projection, then recurse on the slice).
Iterating ``g`` drives points towards ``A`` by a factor 1/9 per step.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .dyadic import Dyadic, exact, mid, pow2_at_most, to_text
from .geometry import (
    BoxRegion,
    Interval,
    SpanComplex,
    as_point,
    cheb,
    cheb_distance,
    closed_ball,
    contains,
    intersect_box,
    is_subset,
    project,
    slice_complex,
)
from .paths import MonotonePath


class InsideComplex(ValueError):
    """The query point already lies in the complex."""


class DecayViolation(AssertionError):
    pass


def _require_closed(A: SpanComplex):
    if A.is_empty:
        raise ValueError("empty complex")
    if not A.is_closed:
        raise ValueError("the retraction needs a closed complex")


def distance(A: SpanComplex, x):
    return exact(cheb_distance(x, A).value)


# ---------------------------------------------------------------------------
# scales


@dataclass(frozen=True)
class Scales:
    d: object
    eps: object
    eta: Dyadic

    @classmethod
    def at(cls, A: SpanComplex, x) -> "Scales":
        d = distance(A, x)
        if d == 0:
            raise InsideComplex(f"{x} lies in the complex")
        eps = exact(Fraction(d) / 10)
        # powers 1/2**k with k a natural number: eta never exceeds 1
        eta = min(pow2_at_most(Fraction(eps) / 10), Dyadic(1))
        return cls(d, eps, eta)


def nearest_point_map(A: SpanComplex, x) -> SpanComplex:
    """``A`` intersected with the closed ball of radius ``d(x, A)``."""
    _require_closed(A)
    x = as_point(x)
    d = distance(A, x)
    if d == 0:
        raise InsideComplex(f"{x} lies in the complex")
    F = intersect_box(A, closed_ball(x, d))
    assert not F.is_empty
    return F


def eta_cover(F: SpanComplex, eta) -> SpanComplex:
    """Union of the ``eta``-lattice boxes meeting ``F`` (one box per box of ``F``)."""
    out = []
    for b in F.boxes:
        ivs = []
        for iv in b.intervals:
            lo = math.ceil(Fraction(iv.lo) / Fraction(eta)) - 1
            hi = math.floor(Fraction(iv.hi) / Fraction(eta)) + 1
            ivs.append(Interval(eta * lo, eta * hi))
        out.append(BoxRegion(tuple(ivs)))
    return SpanComplex(F.dim, tuple(dict.fromkeys(out)))


@dataclass(frozen=True)
class Thickened:
    x: tuple
    scales: Scales
    F: SpanComplex
    F1: SpanComplex


def thicken(A: SpanComplex, x) -> Thickened:
    x = as_point(x)
    sc = Scales.at(A, x)
    F = nearest_point_map(A, x)
    return Thickened(x, sc, F, eta_cover(F, sc.eta))


def hausdorff_gap(F: SpanComplex, F1: SpanComplex):
    """``sup_{p in F1} d(p, F)`` evaluated at the vertices of ``F1``'s arrangement cells."""
    arr = F1.arrangement
    worst = Fraction(0)
    for cell in arr.occupied_cells():
        for v in arr.cell_box(cell).closure().vertices():
            worst = max(worst, Fraction(cheb_distance(v, F).value))
    return worst


# ---------------------------------------------------------------------------
# monotone repair inside F1


def _share_column(a, b, eta) -> bool:
    """Whether ``a`` and ``b`` lie in one closed ``eta``-interval."""
    lo, hi = Fraction(min(a, b)), Fraction(max(a, b))
    return math.ceil(hi / Fraction(eta)) - 1 <= math.floor(lo / Fraction(eta))


def _clamp(v, a, b):
    lo, hi = min(a, b), max(a, b)
    return min(max(v, lo), hi)


def repair_path(F1: SpanComplex, y, z, y_prime, z_prime, gamma_prime: MonotonePath, eta) -> MonotonePath:
    """A monotone path in ``F1`` from ``y`` to ``z`` built from ``gamma_prime``.

    Axes where ``gamma_prime`` runs against ``y -> z`` keep all four
    coordinates in one ``eta`` column and move linearly; every other axis
    follows ``gamma_prime`` clamped to the range between ``y`` and ``z``.
    Short straight pieces join ``y`` and ``z`` to the clamped path.
    """
    y, z, yp, zp = (as_point(p) for p in (y, z, y_prime, z_prime))
    eta = Dyadic.of(eta)
    for a, b in ((y, yp), (z, zp)):
        if not all(_share_column(u, v, eta) for u, v in zip(a, b)):
            raise ValueError(f"{a} and {b} do not share an eta-box")
    if gamma_prime.start != yp or gamma_prime.end != zp:
        raise ValueError("gamma_prime must run from y_prime to z_prime")
    n = len(y)
    linear = []
    for i in range(n):
        s_path = (zp[i] > yp[i]) - (zp[i] < yp[i])
        s_target = (z[i] > y[i]) - (z[i] < y[i])
        linear.append(s_path * s_target < 0)

    wps = gamma_prime.waypoints
    M = len(wps) - 1
    # parameter breakpoints: waypoints plus clamp crossings inside segments
    params = set(Fraction(k, max(M, 1)) for k in range(M + 1))
    for k in range(M):
        p, q = wps[k], wps[k + 1]
        for i in range(n):
            if linear[i] or p[i] == q[i]:
                continue
            for level in (y[i], z[i]):
                lam = Fraction(level - p[i]) / Fraction(q[i] - p[i])
                if 0 < lam < 1:
                    params.add((k + lam) / max(M, 1))

    def gamma_prime_at(t):
        if M == 0:
            return wps[0]
        pos = t * M
        k = min(math.floor(pos), M - 1)
        lam = pos - k
        p, q = wps[k], wps[k + 1]
        return tuple(exact(a + (b - a) * lam) for a, b in zip(p, q))

    def gamma_at(t):
        g = gamma_prime_at(t)
        return tuple(
            exact(y[i] + (z[i] - y[i]) * t) if linear[i] else _clamp(g[i], y[i], z[i]) for i in range(n)
        )

    middle = [gamma_at(t) for t in sorted(params)]
    pts = [y] + middle + [z]
    dedup = [pts[0]]
    for p in pts[1:]:
        if p != dedup[-1]:
            dedup.append(p)
    if len(dedup) == 1:
        dedup.append(dedup[0])
    return MonotonePath.through(dedup)


# ---------------------------------------------------------------------------
# local radius, G and the selection


class RadiusResult(NamedTuple):
    delta: Dyadic
    verified: bool
    probes: int


def _probe_offsets(n: int, probes: int):
    g = 1
    while (2 * g) ** n <= probes:
        g *= 2
    if probes <= 0:
        return []
    return [Fraction(2 * j + 1 - g, g) for j in range(g)]


def local_radius(A: SpanComplex, x, probes: int = 200, max_halvings: int = 8, thick: Thickened = None) -> RadiusResult:
    """Largest ``eta(x) / 2**j`` (``j >= 1``) whose open ball passes the probe check.

    A probe ``y`` passes when ``eta(y) <= eta(x)`` and ``F1(y)`` is inside ``F1(x)``.
    """
    x = as_point(x)
    th = thick or thicken(A, x)
    offs = _probe_offsets(len(x), probes)
    candidates = [th.scales.eta.shift(-j) for j in range(1, max_halvings + 1)]
    if not offs:
        return RadiusResult(candidates[-1], False, 0)
    count = 0
    for delta in candidates:
        ok = True
        for off in itertools.product(offs, repeat=len(x)):
            y = tuple(exact(c + delta * o) for c, o in zip(x, off))
            count += 1
            ty = thicken(A, y)
            if ty.scales.eta > th.scales.eta or not is_subset(ty.F1, th.F1):
                ok = False
                break
        if ok:
            return RadiusResult(delta, True, count)
    return RadiusResult(candidates[-1], False, count)


@dataclass
class QueryInfo:
    thick: Thickened
    radius: RadiusResult


@dataclass
class NeighborhoodReport:
    G: SpanComplex
    members: list
    order_ok: bool
    ball_ok: bool


class RetractionContext:
    """Caches per-point scales, thickenings and radii over a finite sample set."""

    def __init__(self, A: SpanComplex, samples=(), probes: int = 200):
        _require_closed(A)
        self.A = A
        self.probes = probes
        self.samples = [as_point(s) for s in samples]
        self._info: dict = {}

    def info(self, x) -> QueryInfo:
        x = as_point(x)
        hit = self._info.get(x)
        if hit is None:
            th = thicken(self.A, x)
            hit = QueryInfo(th, local_radius(self.A, x, self.probes, thick=th))
            self._info[x] = hit
        return hit

    def add_sample(self, x):
        x = as_point(x)
        if x not in self.samples:
            self.samples.append(x)

    def Q(self, x) -> list:
        """Sample points ``y`` with ``x`` in the open ball of radius ``delta_y / 2``; ``x`` first."""
        x = as_point(x)
        out = [x]
        for y in self.samples:
            if y == x or contains(self.A, y):
                continue
            d_xy = cheb(x, y)
            if d_xy < self.info(y).radius.delta / 2:
                out.append(y)
        return out

    def neighborhood_G(self, x) -> NeighborhoodReport:
        x = as_point(x)
        members = self.Q(x)
        boxes = []
        for y in members:
            inf = self.info(y)
            eta = inf.thick.scales.eta
            for b in inf.thick.F1.boxes:
                boxes.append(BoxRegion(tuple(Interval(iv.lo - eta, iv.hi + eta, False, False) for iv in b.intervals)))
        G = SpanComplex(self.A.dim, tuple(dict.fromkeys(boxes)))
        order_ok = True
        for y1, y2 in itertools.combinations(members, 2):
            i1, i2 = self.info(y1).thick, self.info(y2).thick
            a = is_subset(i1.F1, i2.F1) and i1.scales.eta <= i2.scales.eta
            b = is_subset(i2.F1, i1.F1) and i2.scales.eta <= i1.scales.eta
            order_ok &= a or b
        r = Fraction(4, 3) * Fraction(self.info(x).thick.scales.d)
        ball_ok = all(
            iv.lo >= c - r and iv.hi <= c + r for b in G.boxes for iv, c in zip(b.intervals, x)
        )
        return NeighborhoodReport(G, members, order_ok, ball_ok)


def select_g(G: SpanComplex) -> tuple:
    """Coordinate-wise midpoint selection from a set with interval projections."""
    if G.is_empty:
        raise AssertionError("empty slice during selection")
    proj = project(G, [0])
    lo = min(b.intervals[0].lo for b in proj.boxes)
    hi = max(b.intervals[0].hi for b in proj.boxes)
    c = mid(lo, hi)
    if G.dim == 1:
        if not contains(G, (c,)):
            raise AssertionError("projection is not an interval")
        return (c,)
    rest = slice_complex(G, 0, c)
    return (c,) + select_g(rest)


# ---------------------------------------------------------------------------
# iteration and audits


@dataclass
class StepAudit:
    k: int
    point: tuple
    dist: object
    bound: object
    step: object
    step_bound: object
    witness_gap: object
    witness_bound: object
    order_ok: bool
    ball_ok: bool
    radius_verified: bool

    @property
    def ok(self) -> bool:
        return self.dist <= self.bound and self.step <= self.step_bound and self.witness_gap < self.witness_bound


@dataclass
class Trajectory:
    x: tuple
    d0: object
    steps: list = field(default_factory=list)

    @property
    def points(self) -> list:
        return [s.point for s in self.steps]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def decay_rows(self) -> list:
        rows = [(0, self.d0, self.d0)]
        rows.extend((s.k, s.dist, s.bound) for s in self.steps)
        return rows


def retraction_step(ctx: RetractionContext, x):
    """``g(x)`` with its neighborhood report; ``x`` itself when it lies in ``A``."""
    x = as_point(x)
    if contains(ctx.A, x):
        return x, None
    rep = ctx.neighborhood_G(x)
    g = select_g(rep.G)
    if not contains(rep.G, g):
        raise AssertionError(f"selection {g} left G({x})")
    return g, rep


def _witness_gap(ctx: RetractionContext, x, g, members):
    """Best ``(x', z')`` from graph(F) over ``Q(x)``: returns (gap, 3/10 * eps(x'))."""
    best = None
    for y in members:
        th = ctx.info(y).thick
        gap = max(Fraction(cheb(x, y)), Fraction(cheb_distance(g, th.F).value))
        bound = Fraction(3, 10) * Fraction(th.scales.eps)
        if best is None or gap - bound < best[0] - best[1]:
            best = (gap, bound)
    return best


def iterate_retraction(A: SpanComplex, x, K: int, ctx: RetractionContext = None, strict: bool = True) -> Trajectory:
    """``g(x), ..., g^K(x)`` with the decay and step bounds audited at each step."""
    ctx = ctx or RetractionContext(A, [x])
    x = as_point(x)
    d0 = distance(A, x)
    traj = Trajectory(x, d0)
    cur = x
    for k in range(1, K + 1):
        dk = distance(A, cur)
        nxt, rep = retraction_step(ctx, cur)
        dist = distance(A, nxt)
        bound = Fraction(d0) / 9**k
        step = cheb(nxt, cur)
        step_bound = Fraction(4, 3) * Fraction(dk)
        if rep is None:
            wgap, wbound, order_ok, ball_ok, rv = Fraction(0), Fraction(1), True, True, True
        else:
            wgap, wbound = _witness_gap(ctx, cur, nxt, rep.members)
            order_ok, ball_ok = rep.order_ok, rep.ball_ok
            rv = ctx.info(cur).radius.verified
        audit = StepAudit(k, nxt, dist, bound, step, step_bound, wgap, wbound, order_ok, ball_ok, rv)
        traj.steps.append(audit)
        if strict and not audit.ok:
            raise DecayViolation(f"step {k} from {x}: {audit}")
        cur = nxt
    return traj


def exterior_points(A: SpanComplex, count: int, rng, margin=1, bits: int = 6) -> list:
    """``count`` random points on the ``2**-bits`` grid of the padded bounds, outside ``A``."""
    b = A.bounds()
    pts = []
    while len(pts) < count:
        p = []
        for iv in b.intervals:
            lo = (iv.lo - margin) * (1 << bits)
            hi = (iv.hi + margin) * (1 << bits)
            p.append(Dyadic(rng.randint(int(lo), int(hi)), bits))
        p = tuple(p)
        if not contains(A, p):
            pts.append(p)
    return pts


def decay_csv(trajectories) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trajectory", "k", "distance", "bound"])
    for j, tr in enumerate(trajectories):
        for k, d, b in tr.decay_rows():
            w.writerow([j, k, to_text(exact(d)), to_text(exact(Fraction(b)))])
    return buf.getvalue()


def audit_dict(trajectories) -> dict:
    steps = [s for tr in trajectories for s in tr.steps]
    return {
        "trajectories": len(trajectories),
        "steps": len(steps),
        "decay_violations": sum(s.dist > s.bound for s in steps),
        "step_violations": sum(s.step > s.step_bound for s in steps),
        "witness_violations": sum(s.witness_gap >= s.witness_bound for s in steps),
        "q_order_warnings": sum(not s.order_ok for s in steps),
        "ball_bound_violations": sum(not s.ball_ok for s in steps),
        "unverified_radii": sum(not s.radius_verified for s in steps),
        "worst_decay_ratio": str(max((Fraction(s.dist) / Fraction(s.bound) for s in steps), default=Fraction(0))),
        "worst_step_ratio": str(
            max((Fraction(s.step) / Fraction(s.step_bound) for s in steps if s.step_bound), default=Fraction(0))
        ),
    }
