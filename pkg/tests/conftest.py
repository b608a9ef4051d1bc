import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from monovex.dyadic import Dyadic  # noqa: E402
from monovex.geometry import BoxRegion, Interval, SpanComplex  # noqa: E402

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def dyadics(max_exp: int = 6, bound: int = 1 << 12):
    return st.builds(Dyadic, st.integers(-bound, bound), st.integers(0, max_exp))


@st.composite
def intervals(draw, span: int = 6, mode: str = "closed", allow_point: bool = True):
    min_width = 0 if allow_point and mode == "closed" else 1
    a = draw(st.integers(0, span - min_width))
    b = draw(st.integers(min_width, span - a))
    lo, hi = Dyadic(a, 1), Dyadic(a + b, 1)
    if b == 0:
        return Interval(lo, hi)
    if mode == "closed":
        return Interval(lo, hi)
    if mode == "open":
        return Interval(lo, hi, False, False)
    return Interval(lo, hi, draw(st.booleans()), draw(st.booleans()))


@st.composite
def complexes(draw, n=None, max_boxes: int = 4, mode: str = "closed", span: int = 6):
    n = n or draw(st.integers(1, 3))
    k = draw(st.integers(1, max_boxes))
    boxes = tuple(BoxRegion(tuple(draw(intervals(span, mode)) for _ in range(n))) for _ in range(k))
    return SpanComplex(n, boxes)


def points_in(grid_points, grid):
    """Strategy for sample-grid points of a complex (as coordinate tuples)."""
    return st.sampled_from(grid_points).map(grid.point)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


def record(criterion: int, ok: bool, seconds: float, detail: str = "") -> None:
    ACCEPTANCE[criterion] = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion:2d}  {seconds:7.2f} s  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
