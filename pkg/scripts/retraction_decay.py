"""Distance decay of iterated retraction steps from random exterior points."""

import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from monovex import examples as ex
from monovex.retraction import RetractionContext, audit_dict, exterior_points, iterate_retraction


@dataclass
class Config:
    K: int = 3
    points: int = 50
    iterations: int = 4
    seed: int = 0


def run(cfg: Config) -> None:
    A = ex.example1(cfg.K)
    xs = exterior_points(A, cfg.points, random.Random(cfg.seed))
    ctx = RetractionContext(A, xs)
    trajs = [iterate_retraction(A, x, cfg.iterations, ctx, strict=False) for x in xs]
    for key, value in audit_dict(trajs).items():
        print(f"{key:24s} {value}")
    print(f"\n{'k':>2s}  {'max d(g^k x, A) / d(x, A)':>28s}  {'bound 9^-k':>12s}")
    for k in range(1, cfg.iterations + 1):
        worst = max(Fraction(t.steps[k - 1].dist) / Fraction(t.d0) for t in trajs)
        print(f"{k:2d}  {float(worst):28.3e}  {9.0**-k:12.3e}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name}", type=int, default=default)
    run(Config(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
