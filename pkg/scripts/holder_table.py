"""Per-level vertex spreads of the grid extension and fitted Hoelder exponents."""

import argparse
import random
from dataclasses import dataclass

from monovex import examples as ex
from monovex.extension import DenseField, check_property_P, extend, holder_report, random_seed


@dataclass
class Config:
    K: int = 3
    depth: int = 6
    domain_dim: int = 2
    side: int = 1
    seed: int = 0


def run(cfg: Config) -> None:
    A = ex.example1(cfg.K)
    f = extend(random_seed(A, cfg.domain_dim, random.Random(cfg.seed), side=cfg.side), cfg.depth, A)
    dense = DenseField.of(f)
    prop = check_property_P(f, dense)
    rep = holder_report(f, dense)
    print(f"Property (P): {len(prop.violations)} violations over {prop.checked_faces} faces")
    print(f"{'level':>5s} {'axis':>4s}  {'max spread M':28s} {'max child spread N':28s}")
    for r in rep.rows:
        print(f"{r.level:5d} {r.axis_rotated:4d}  {str(r.max_M):28s} {str(r.max_N):28s}")
    print("halving violations:", rep.halving_violations, " growth violations:", rep.growth_violations)
    print("exponent estimates (one per window of n levels, expect 1/n):", [round(e, 3) if e is not None else None for e in rep.exponent_estimates])


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    run(Config(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
