"""Monovex-implies-acyclic fuzz across closedness modes and dimensions."""

import argparse
import time
from dataclasses import dataclass

from monovex.fuzz import MODES, FuzzConfig, run_fuzz


@dataclass
class Config:
    trials: int = 100
    seed: int = 0
    max_boxes: int = 6


def run(cfg: Config) -> None:
    print(f"{'mode':10s} {'n':>2s} {'ok':>5s} {'violation':>10s} {'discovery':>10s} {'no-sample':>10s} {'seconds':>8s}")
    for mode in MODES:
        for n in (1, 2, 3):
            t = time.perf_counter()
            rep = run_fuzz(FuzzConfig(seed=cfg.seed, n=n, max_boxes=cfg.max_boxes, mode=mode, trials=cfg.trials))
            c = rep["counts"]
            print(f"{mode:10s} {n:2d} {c['ok']:5d} {c['violation']:10d} {c['discovery']:10d} "
                  f"{c['no-sample']:10d} {time.perf_counter() - t:8.2f}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    run(Config(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
