"""Command-line front end: ``thetagrid {resistance,errormap,bench,netlist,selftest}``.

Exit codes: 0 success, 1 failed self-test, 2 invalid flags, 3 solver or
quadrature failure, 4 unwritable output path.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

from . import selftest
from .correction import r_finite_hybrid
from .experiments import METHODS, bench, error_map
from .finite_grid import DegenerateThetaError, GridSpec, r_theta_closed
from .kernel import QuadratureError, omega_analytic_infinite, omega_exact
from .oracle import SolverError, emit_netlist, r_oracle

EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_OUTPUT = 4

RESISTANCE_METHODS = ("theta", "hybrid", "oracle", "analytic-infinite", "exact-infinite")


class UsageError(Exception):
    pass


def _node(text):
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y integers, got {text!r}") from None
    return x, y


def _add_grid_flags(p, alpha=True, resistances=True):
    p.add_argument("--lx", type=int, required=True, help="nodes along x")
    p.add_argument("--ly", type=int, required=True, help="nodes along y")
    if resistances:
        p.add_argument("--rh", type=float, help="horizontal resistor, ohms")
        p.add_argument("--rv", type=float, help="vertical resistor, ohms")
    if alpha:
        p.add_argument("--alpha", type=float, help="anisotropy r_h / r_v (r_v = 1 unless --rv)")


def _grid(args) -> GridSpec:
    rh = getattr(args, "rh", None)
    rv = getattr(args, "rv", None)
    alpha = getattr(args, "alpha", None)
    if alpha is not None:
        if not (alpha > 0 and math.isfinite(alpha)):
            raise UsageError(f"--alpha must be positive, got {alpha}")
        if rh is not None and rv is not None:
            if not math.isclose(rh / rv, alpha, rel_tol=1e-12):
                raise UsageError(f"--alpha {alpha} disagrees with --rh/--rv = {rh / rv}")
        elif rh is not None:
            rv = rh / alpha
        else:
            rv = 1.0 if rv is None else rv
            rh = alpha * rv
    rh = 1.0 if rh is None else rh
    rv = 1.0 if rv is None else rv
    try:
        return GridSpec(args.lx, args.ly, r_h=rh, r_v=rv)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _nodes(grid, *nodes):
    for node in nodes:
        if not grid.contains(node):
            raise UsageError(f"node {node[0]},{node[1]} outside {grid.lx}x{grid.ly} grid")


def _emit(obj):
    print(json.dumps(obj))


def cmd_resistance(args):
    grid = _grid(args)
    _nodes(grid, args.src, args.dst)
    t0 = time.perf_counter()
    applied = 0
    disp = (args.dst[0] - args.src[0], args.dst[1] - args.src[1])
    if args.method == "hybrid":
        res = r_finite_hybrid(args.src, args.dst, grid)
        value, applied = res.resistance_ohms, res.corrections_applied
    elif args.method == "theta":
        value = r_theta_closed(args.src, args.dst, grid)
    elif args.method == "oracle":
        value = r_oracle(args.src, args.dst, grid)
    elif args.method == "analytic-infinite":
        value = grid.r0 * omega_analytic_infinite(disp, grid.alpha)
    else:
        value = grid.r0 * omega_exact(disp, grid.alpha)
    _emit({"resistance_ohms": value, "method": args.method,
           "corrections_applied": applied,
           "wall_time_ms": 1e3 * (time.perf_counter() - t0)})
    return 0


def cmd_errormap(args):
    grid = _grid(args)
    _nodes(grid, args.src)
    try:
        handle = open(args.out, "w", newline="")
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    with handle:
        report = error_map(grid, args.src, args.method)
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x", "y", "r_method", "r_oracle", "rel_error_percent"])
        for x, y, value, ref, rel in report.per_node:
            writer.writerow([x, y, repr(value), repr(ref), repr(100.0 * rel)])
    _emit(report.summary())
    return 0


def cmd_bench(args):
    if args.queries < 0:
        raise UsageError("--queries must be non-negative")
    grid = _grid(args)
    _emit(bench(grid, args.queries, seed=args.seed).summary())
    return 0


def cmd_netlist(args):
    grid = _grid(args)
    _nodes(grid, args.src, args.dst)
    if tuple(args.src) == tuple(args.dst):
        raise UsageError("--src and --dst must differ")
    text = emit_netlist(grid, args.src, args.dst)
    if args.out is None:
        sys.stdout.write(text)
        return 0
    try:
        with open(args.out, "w", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return 0


def cmd_selftest(args):
    return selftest.run(fast=args.fast)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thetagrid",
        description="Two-point resistance of finite anisotropic resistor grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resistance", help="one node pair, JSON result")
    _add_grid_flags(p)
    p.add_argument("--src", type=_node, required=True, metavar="X,Y")
    p.add_argument("--dst", type=_node, required=True, metavar="X,Y")
    p.add_argument("--method", choices=RESISTANCE_METHODS, default="hybrid")
    p.set_defaults(func=cmd_resistance)

    p = sub.add_parser("errormap", help="per-node error against the oracle, CSV plus JSON summary")
    _add_grid_flags(p)
    p.add_argument("--src", type=_node, required=True, metavar="X,Y")
    p.add_argument("--method", choices=METHODS, default="hybrid")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_errormap)

    p = sub.add_parser("bench", help="random hybrid queries and cache statistics")
    _add_grid_flags(p)
    p.add_argument("--queries", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("netlist", help="SPICE netlist of the grid")
    _add_grid_flags(p, alpha=False)
    p.add_argument("--src", type=_node, required=True, metavar="X,Y")
    p.add_argument("--dst", type=_node, required=True, metavar="X,Y")
    p.add_argument("--out", help="output path (default: standard output)")
    p.set_defaults(func=cmd_netlist)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.add_argument("--fast", action="store_true", help="skip the 50x50 sweeps and the benchmark")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"thetagrid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, QuadratureError, DegenerateThetaError) as exc:
        print(f"thetagrid: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
