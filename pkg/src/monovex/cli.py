"""Command line entry point.

Exit codes: 0 ok, 1 invariant violation, 2 usage error, 3 parse error,
4 dimension mismatch, 5 precondition failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import examples as ex
from .dyadic import Dyadic, exact, to_text
from .extension import (
    DenseField,
    NoMonotonePath,
    check_property_P,
    extend,
    holder_report,
    random_seed,
)
from .fuzz import FuzzConfig, run_fuzz
from .geometry import (
    BoxRegion,
    DimensionMismatch,
    Interval,
    Lattice,
    SpanComplex,
    contains,
    minkowski_box,
)
from .homology import CubicalComplex, coordinate_unit, cycle_to_off, poset_betti
from .homotopy import PreconditionError, audit_points, contract_to_point
from .paths import NotInComplex, is_monovex, monotone_reachable, validate_monotone
from .raster import SegmentSet, rasterize_minkowski, to_complex, to_off
from .retraction import (
    InsideComplex,
    RetractionContext,
    audit_dict,
    decay_csv,
    exterior_points,
    iterate_retraction,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_PARSE, EXIT_DIM, EXIT_PRECONDITION = range(6)


class ParseError(ValueError):
    pass


class Violation(RuntimeError):
    def __init__(self, report: dict):
        super().__init__("invariant violation")
        self.report = report


# ---------------------------------------------------------------------------
# input helpers


def parse_point(text: str) -> tuple:
    try:
        return tuple(Dyadic.parse(t) for t in text.split(","))
    except ValueError as err:
        raise ParseError(f"bad point {text!r}: {err}") from err


def parse_dyadic(text: str) -> Dyadic:
    try:
        return Dyadic.parse(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def read_json(args) -> dict:
    try:
        raw = Path(args.input).read_text() if args.input else sys.stdin.read()
        return json.loads(raw)
    except (OSError, json.JSONDecodeError) as err:
        raise ParseError(f"cannot read input: {err}") from err


def read_complex(args) -> SpanComplex:
    data = read_json(args)
    if isinstance(data, dict) and "complex" in data:
        data = data["complex"]
    try:
        return SpanComplex.from_dict(data)
    except DimensionMismatch:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"malformed complex: {err}") from err


def dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def emit(args, report: dict, files: dict = None) -> None:
    text = dump(report)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n")
        for name, content in (files or {}).items():
            (out / name).write_text(content)


def _pt(p) -> list:
    return [to_text(exact(c)) for c in p]


# ---------------------------------------------------------------------------
# subcommands


def cmd_examples(args) -> int:
    kw = {}
    if args.K is not None:
        kw["K"] = args.K
    if args.eps is not None:
        kw["eps"] = args.eps
    if args.resolution is not None:
        kw["h"] = args.resolution
    if args.T is not None:
        kw["T"] = args.T
    try:
        c = ex.CATALOG[args.name](**kw)
    except ValueError as err:
        raise PreconditionError(str(err)) from err
    print(dump(c.to_dict()))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "complex.json").write_text(dump(c.to_dict()) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    c = read_complex(args)
    verdict = is_monovex(c)
    report = {"is_monovex": verdict.is_monovex, "witness": None}
    if verdict.witness is not None:
        report["witness"] = [_pt(p) for p in verdict.witness]
    emit(args, report)
    return EXIT_OK


def cmd_path(args) -> int:
    c = read_complex(args)
    x, y = parse_point(args.source), parse_point(args.target)
    path = monotone_reachable(c, x, y)
    report = {"reachable": path is not None, "path": None}
    if path is not None:
        if not validate_monotone(path, c):
            raise Violation({"error": "produced path failed validation", "path": path.to_dict()})
        report["path"] = path.to_dict()
    emit(args, report)
    return EXIT_OK


def cmd_betti(args) -> int:
    c = read_complex(args)
    files = {}
    if c.is_closed:
        step = args.resolution or coordinate_unit(c)
        grid = Lattice.cubic(c.dim, step)
        try:
            cc = CubicalComplex.from_complex(c, grid)
        except ValueError as err:
            raise PreconditionError(str(err)) from err
        full = cc.betti_numbers()
        method = "cubical"
        report_extra = {"euler": cc.euler_characteristic(), "cells": {str(k): len(v) for k, v in cc.cells.items()}}
        if len(full) > 1 and full[1] > 0:
            loop = cc.one_cycle()
            if loop is not None:
                files["mesh.off"] = cycle_to_off(loop, cc.coords)
    else:
        full = poset_betti(c)
        method = "order-complex"
        report_extra = {}
    # beta_n of a subset of R^n is always zero; report beta_0 .. beta_{n-1}
    report = {"betti": list(full[: c.dim]), "betti_full": list(full), "method": method, **report_extra}
    emit(args, report, files)
    return EXIT_OK


def cmd_extend(args) -> int:
    A = read_complex(args)
    verdict = is_monovex(A)
    if not verdict.is_monovex:
        raise PreconditionError("the target complex is not monovex")
    seed = random_seed(A, args.domain_dim, random.Random(args.seed), side=args.side)
    field_ = extend(seed, args.depth, A)
    dense = DenseField.of(field_)
    prop = check_property_P(field_, dense)
    report = {
        "depth": args.depth,
        "seed_values": {",".join(_pt(k)): _pt(v) for k, v in sorted(seed.values.items())},
        "property_P": {"checked_faces": prop.checked_faces, "violations": prop.violations},
    }
    if args.depth >= 1:
        report["holder"] = holder_report(field_, dense).to_dict()
    outside = [k for k, v in field_.samples().items() if not contains(A, v)]
    report["range_violations"] = len(outside)
    emit(args, report, {"extension.csv": field_.to_csv()})
    bad = prop.violations or outside or (args.depth >= 1 and (report["holder"]["halving_violations"] or report["holder"]["growth_violations"]))
    if bad:
        raise Violation(report)
    return EXIT_OK


def cmd_contract(args) -> int:
    A = read_complex(args)
    if not A.is_closed:
        raise PreconditionError("contraction needs a closed complex")
    if not is_monovex(A).is_monovex:
        raise PreconditionError("the complex is not monovex")
    x0 = parse_point(args.base) if args.base else A.boxes[0].upper()
    if len(x0) != A.dim:
        raise DimensionMismatch("base point dimension")
    delta0 = args.delta or Dyadic(1, 2)
    H = contract_to_point(A, x0, K=args.levels, depth=args.depth, delta0=delta0, xs=audit_points(A, delta0))
    start_ok = all(v == x for x, v in H.slice(0).items())
    end_ok = all(v == H.x0 for v in H.slice(1).values())
    range_bad = sum(not contains(A, v) for v in H.samples.values())
    junction_bad = [j for j in H.junctions if j[3] > j[4]]
    report = {
        "base_point": _pt(H.x0),
        "levels": args.levels,
        "depth": args.depth,
        "samples": len(H.samples),
        "t0_identity": start_ok,
        "t1_constant": end_ok,
        "range_violations": range_bad,
        "junctions": len(H.junctions),
        "junction_violations": len(junction_bad),
        "worst_junction_ratio": str(max((Fraction(j[3]) / Fraction(j[4]) for j in H.junctions), default=Fraction(0))),
    }
    emit(args, report, {"homotopy.csv": H.to_csv(), "mesh.off": H.to_off()})
    if not (start_ok and end_ok) or range_bad or junction_bad:
        raise Violation(report)
    return EXIT_OK


def cmd_retract(args) -> int:
    A = read_complex(args)
    if not A.is_closed:
        raise PreconditionError("the retraction needs a closed complex")
    if not is_monovex(A).is_monovex:
        raise PreconditionError("the complex is not monovex")
    rng = random.Random(args.seed)
    if args.point:
        xs = [parse_point(args.point)]
        if len(xs[0]) != A.dim:
            raise DimensionMismatch("query point dimension")
        if contains(A, xs[0]):
            raise InsideComplex("the query point already lies in the complex")
    else:
        xs = exterior_points(A, args.trials, rng)
    ctx = RetractionContext(A, xs, probes=args.probes)
    trajs = [iterate_retraction(A, x, args.iterations, ctx, strict=False) for x in xs]
    report = audit_dict(trajs)
    report["iterations"] = args.iterations
    report["final_points"] = [_pt(t.points[-1]) for t in trajs]
    emit(args, report, {"decay.csv": decay_csv(trajs)})
    if report["decay_violations"] or report["step_violations"] or report["witness_violations"]:
        raise Violation(report)
    return EXIT_OK


def _parse_box(text: str, n: int) -> BoxRegion:
    ivs = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        ivs.append(Interval(Dyadic.parse(lo), Dyadic.parse(hi or lo)))
    if len(ivs) != n:
        raise DimensionMismatch("box dimension does not match the complex")
    return BoxRegion(tuple(ivs))


def _segments(raw) -> SegmentSet:
    return SegmentSet(tuple((tuple(Dyadic.parse(c) for c in p), tuple(Dyadic.parse(c) for c in q)) for p, q in raw))


def cmd_minkowski(args) -> int:
    data = read_json(args)
    files = {}
    if isinstance(data, dict) and "A" in data and "B" in data:
        try:
            a, b = _segments(data["A"]), _segments(data["B"])
        except (TypeError, ValueError) as err:
            raise ParseError(f"malformed segment sets: {err}") from err
        if a.n != b.n:
            raise DimensionMismatch("segment sets of different dimension")
        h = args.resolution or Dyadic(1, 3)
        grid = rasterize_minkowski(a, b, h)
        c = to_complex(grid)
        if grid.n == 3:
            files["mesh.off"] = to_off(grid)
        extra = {"voxels": len(grid.occupancy), "resolution": to_text(h)}
    else:
        try:
            A = SpanComplex.from_dict(data)
        except DimensionMismatch:
            raise
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError(f"malformed complex: {err}") from err
        if not args.box:
            raise PreconditionError("--box is required for a complex plus box sum")
        try:
            R = _parse_box(args.box, A.dim)
        except ValueError as err:
            if isinstance(err, DimensionMismatch):
                raise
            raise ParseError(str(err)) from err
        c = minkowski_box(A, R)
        extra = {}
    verdict = is_monovex(c)
    report = {"complex": c.to_dict(), "is_monovex": verdict.is_monovex, **extra}
    emit(args, report, files)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    try:
        cfg = FuzzConfig(seed=args.seed, n=args.dim, max_boxes=args.boxes, mode=args.mode, trials=args.trials)
    except ValueError as err:
        raise PreconditionError(str(err)) from err
    report = run_fuzz(cfg)
    emit(args, report)
    if report["counts"]["violation"]:
        raise Violation(report)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monovex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, input_=True):
        if input_:
            sp.add_argument("--input", help="complex JSON file (default: stdin)")
        sp.add_argument("--out", help="directory for report.json and companion files")

    sp = sub.add_parser("check", help="decide monovexity and print a witness pair")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("path", help="monotone path between two points")
    common(sp)
    sp.add_argument("--from", dest="source", required=True, help="point, e.g. 1/2,3")
    sp.add_argument("--to", dest="target", required=True)
    sp.set_defaults(func=cmd_path)

    sp = sub.add_parser("betti", help="mod-2 Betti numbers")
    common(sp)
    sp.add_argument("--resolution", type=parse_dyadic, help="cubical grid step (closed complexes)")
    sp.set_defaults(func=cmd_betti)

    sp = sub.add_parser("extend", help="grid extension with Property (P) and Hoelder report")
    common(sp)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--domain-dim", type=int, default=2)
    sp.add_argument("--side", type=int, default=1, help="domain is [0, side]^m on the unit lattice")
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("contract", help="Cantor-scheme contraction to a base point")
    common(sp)
    sp.add_argument("--delta", type=parse_dyadic, help="delta_0 (default 1/2)")
    sp.add_argument("--depth", type=int, default=2, help="extension depth of each path field")
    sp.add_argument("--levels", type=int, default=4, help="Cantor levels")
    sp.add_argument("--base", help="base point (default: upper corner of the first box)")
    sp.set_defaults(func=cmd_contract)

    sp = sub.add_parser("retract", help="iterate the sampled retraction and audit the decay")
    common(sp)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--iterations", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--probes", type=int, default=200)
    sp.add_argument("--point", help="single query point instead of random ones")
    sp.set_defaults(func=cmd_retract)

    sp = sub.add_parser("minkowski", help="complex + box, or voxelized segment-set sum")
    common(sp)
    sp.add_argument("--box", help="lo:hi per axis, comma separated")
    sp.add_argument("--resolution", type=parse_dyadic, help="voxel size for segment sums")
    sp.set_defaults(func=cmd_minkowski)

    sp = sub.add_parser(
        "examples",
        help="print a catalog complex",
        description=(
            "example1 truncates the dyadic staircase at K squares and omits the origin; "
            "example2 is the exact half-open set; example2_closed is its closed surrogate "
            "with gap eps; example3/example4 are voxelized segment sums (resolution h, "
            "diagonal truncated to [-T, T])."
        ),
    )
    sp.add_argument("name", choices=sorted(ex.CATALOG))
    sp.add_argument("--K", type=int)
    sp.add_argument("--eps", type=parse_dyadic)
    sp.add_argument("--resolution", type=parse_dyadic)
    sp.add_argument("--T", type=parse_dyadic)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("fuzz", help="random monovex complexes must be acyclic")
    sp.add_argument("--mode", choices=["closed", "open", "half-open"], default="closed")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--boxes", type=int, default=6)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Violation as v:
        print(dump(v.report), file=sys.stderr)
        return EXIT_VIOLATION
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionMismatch as err:
        print(f"dimension mismatch: {err}", file=sys.stderr)
        return EXIT_DIM
    except (PreconditionError, NotInComplex, InsideComplex, NoMonotonePath) as err:
        print(f"precondition failed: {err}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
