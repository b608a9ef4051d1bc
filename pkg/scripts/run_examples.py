"""Verdicts, Betti numbers and timings for every catalog example."""

import argparse
import time
from fractions import Fraction
from dataclasses import dataclass

from monovex import examples as ex
from monovex.dyadic import Dyadic
from monovex.homology import betti_numbers, poset_betti
from monovex.paths import is_monovex


@dataclass
class Config:
    K: int = 3
    eps: Dyadic = Dyadic(1, 2)
    raster_h: Dyadic = Dyadic(1, 3)


def run(cfg: Config) -> None:
    eps, h = Fraction(cfg.eps), Fraction(cfg.raster_h)
    builders = {
        "lshape": ex.lshape,
        "sshape": ex.sshape,
        f"example1 (K={cfg.K})": lambda: ex.example1(cfg.K),
        "example2 (half-open)": ex.example2,
        f"example2_closed (eps={eps})": lambda: ex.example2_closed(cfg.eps),
        f"example3 (h={h})": lambda: ex.CATALOG["example3"](h=cfg.raster_h),
        f"example4 (h={h}, T=1)": lambda: ex.CATALOG["example4"](h=cfg.raster_h),
    }
    print(f"{'example':36s} {'boxes':>6s} {'monovex':>8s}  betti            seconds")
    for name, build in builders.items():
        t = time.perf_counter()
        c = build()
        verdict = is_monovex(c).is_monovex
        betti = betti_numbers(c) if c.is_closed else poset_betti(c)
        print(f"{name:36s} {len(c.boxes):6d} {str(verdict):>8s}  {str(betti[: c.dim]):16s} {time.perf_counter() - t:7.2f}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--eps", type=Dyadic.parse, default=Dyadic(1, 2))
    p.add_argument("--resolution", type=Dyadic.parse, default=Dyadic(1, 3))
    a = p.parse_args()
    run(Config(a.K, a.eps, a.resolution))


if __name__ == "__main__":
    main()
