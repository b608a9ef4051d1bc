"""Random box complexes and the monovex-implies-acyclic property run."""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from .dyadic import Dyadic
from .geometry import BoxRegion, Interval, SpanComplex
from .homology import betti_numbers
from .paths import is_monovex

MODES = ("closed", "open", "half-open")


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    n: int = 3  # maximum dimension; each trial draws 2..n (1..n when n == 1)
    max_boxes: int = 6
    mode: str = "closed"
    trials: int = 100
    span: int = 6  # endpoints are k/2 with 0 <= k <= span
    max_attempts: int = 2000

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 1 <= self.n <= 3:
            raise ValueError("fuzzing supports 1 <= n <= 3")
        if self.max_boxes < 1 or self.trials < 0:
            raise ValueError("box budget and trial count must be positive")


def random_interval(rng: random.Random, span: int, mode: str, allow_point: bool) -> Interval:
    while True:
        a, b = sorted(rng.randint(0, span) for _ in range(2))
        if a == b and not (allow_point and mode == "closed"):
            continue
        lo, hi = Dyadic(a, 1), Dyadic(b, 1)
        if mode == "closed":
            return Interval(lo, hi)
        if mode == "open":
            return Interval(lo, hi, False, False)
        return Interval(lo, hi, rng.random() < 0.5, rng.random() < 0.5)


def random_complex(rng: random.Random, n: int, boxes: int, mode: str, span: int = 6) -> SpanComplex:
    out = []
    for _ in range(boxes):
        allow_point = rng.random() < 0.15
        out.append(BoxRegion(tuple(random_interval(rng, span, mode, allow_point) for _ in range(n))))
    return SpanComplex(n, tuple(out))


def draw_monovex(rng: random.Random, n: int, cfg: FuzzConfig):
    """Rejection sample a monovex complex with at least two boxes; returns (complex, attempts)."""
    for attempt in range(1, cfg.max_attempts + 1):
        k = rng.randint(min(2, cfg.max_boxes), cfg.max_boxes)
        c = random_complex(rng, n, k, cfg.mode, cfg.span)
        if is_monovex(c).is_monovex:
            return c, attempt
    return None, cfg.max_attempts


def run_trial(cfg: FuzzConfig, index: int) -> dict:
    rng = random.Random(f"{cfg.seed}:{index}")
    n = cfg.n if cfg.n == 1 else rng.randint(2, cfg.n)
    c, attempts = draw_monovex(rng, n, cfg)
    if c is None:
        return {"trial": index, "n": n, "status": "no-sample", "attempts": attempts}
    betti = betti_numbers(c)
    acyclic = betti[0] == 1 and not any(betti[1:])
    if acyclic:
        status = "ok"
    elif cfg.mode == "half-open":
        status = "discovery"
    else:
        status = "violation"
    return {
        "trial": index,
        "n": n,
        "boxes": len(c.boxes),
        "attempts": attempts,
        "betti": list(betti),
        "status": status,
        "complex": c.to_dict() if status != "ok" else None,
    }


def thread_cap() -> int:
    raw = os.environ.get("MONOVEX_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 1
    return max(1, min(cap, os.cpu_count() or 1))


def run_fuzz(cfg: FuzzConfig, workers: int = None) -> dict:
    workers = workers or thread_cap()
    if workers > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_trial, [cfg] * cfg.trials, range(cfg.trials)))
    else:
        results = [run_trial(cfg, i) for i in range(cfg.trials)]
    results.sort(key=lambda r: r["trial"])
    counts = {s: sum(r["status"] == s for r in results) for s in ("ok", "violation", "discovery", "no-sample")}
    return {"config": asdict(cfg), "counts": counts, "trials": results}
