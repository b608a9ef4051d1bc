"""Betti numbers and monovexity of the closed surrogate of the half-open example as eps shrinks."""

import argparse
import time

from monovex import examples as ex
from monovex.dyadic import Dyadic
from monovex.homology import betti_numbers
from monovex.paths import is_monovex


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-exponent", type=int, default=4, help="eps runs over 1/2 .. 1/2^k")
    a = p.parse_args()
    print(f"{'eps':>8s} {'monovex':>8s}  {'betti':14s} {'seconds':>8s}")
    for e in range(1, a.max_exponent + 1):
        t = time.perf_counter()
        c = ex.example2_closed(Dyadic(1, e))
        b = betti_numbers(c)
        print(f"{'1/' + str(1 << e):>8s} {str(is_monovex(c).is_monovex):>8s}  {str(b[:3]):14s} {time.perf_counter() - t:8.2f}")


if __name__ == "__main__":
    main()
