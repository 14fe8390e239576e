"""Command-line front end: generation, consistency runs, game solving,
artifact verification, and the scaling experiment."""

from __future__ import annotations

import argparse
import csv
import sys
import time

from . import __version__
from .gadgets import build_instance
from .pebblegame import (
    ResourceLimitError,
    read_strategy,
    spoiler_min_rounds,
    verify_critical_strategy,
)
from .propagation import (
    PARALLEL,
    extract_refutation,
    read_derivation,
    saturate,
    verify_derivation,
    write_derivation,
)
from .structures import StructureError, read_structure, write_structure

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2


def _load_structure(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return read_structure(fh.read())


def cmd_gen(args) -> int:
    inst = build_instance(args.k, args.n, args.m)
    with open(args.out_a, "w", encoding="utf-8") as fh:
        fh.write(write_structure(inst.a))
    with open(args.out_b, "w", encoding="utf-8") as fh:
        fh.write(write_structure(inst.b))
    print(f"wrote {args.out_a} ({len(inst.a)} vertices) and {args.out_b} ({len(inst.b)} vertices)")
    return EXIT_OK


def cmd_consistency(args) -> int:
    a = _load_structure(args.a)
    b = _load_structure(args.b)
    result = saturate(a, b, args.k, mode=args.mode, threads=args.threads)
    if not result.refuted:
        print("ESTABLISHED")
        return EXIT_OK
    depth = result._engine.store[()]
    width = max((len(key) for key in result._engine.store), default=0)
    print(f"REFUTED depth={depth} width={width} props={len(result.inconsistent)}")
    if args.emit_derivation:
        deriv = extract_refutation(result, a, b, args.k)
        with open(args.emit_derivation, "w", encoding="utf-8") as fh:
            fh.write(write_derivation(deriv, a, b))
    return EXIT_OK


def cmd_game(args) -> int:
    a = _load_structure(args.a)
    b = _load_structure(args.b)
    rounds = spoiler_min_rounds(
        a, b, args.k, max_positions=args.max_positions, threads=args.threads
    )
    if rounds is None:
        print("DUPLICATOR-WINS")
    else:
        print(f"SPOILER-WINS rounds={rounds}")
    return EXIT_OK


def cmd_verify_derivation(args) -> int:
    a = _load_structure(args.a)
    b = _load_structure(args.b)
    with open(args.derivation, "r", encoding="utf-8") as fh:
        deriv = read_derivation(fh.read(), a, b)
    res = verify_derivation(deriv, a, b, deriv.k)
    if res.ok:
        print("OK")
        return EXIT_OK
    print(res.reason)
    return EXIT_VERIFY


def cmd_verify_strategy(args) -> int:
    a = _load_structure(args.a)
    b = _load_structure(args.b)
    with open(args.strategy, "r", encoding="utf-8") as fh:
        strat = read_strategy(fh.read())
    res = verify_critical_strategy(strat, a, b, args.k)
    if res.ok:
        print("OK")
        return EXIT_OK
    print(res.reason)
    return EXIT_VERIFY


def cmd_experiment(args) -> int:
    ns = [int(tok) for tok in args.n.split(",") if tok]
    ms = [int(tok) for tok in args.m.split(",") if tok]
    rows = []
    for n in ns:
        for m in ms:
            inst = build_instance(args.k, n, m)
            t0 = time.monotonic()
            result = saturate(inst.a, inst.b, args.k, mode=PARALLEL, threads=args.threads)
            sat_ms = int((time.monotonic() - t0) * 1000)
            sat_depth = result._engine.store.get(()) if result.refuted else None
            rows.append(
                dict(
                    k=args.k,
                    n=n,
                    m=m,
                    vertices_a=len(inst.a),
                    vertices_b=len(inst.b),
                    method="saturation",
                    depth="" if sat_depth is None else sat_depth,
                    prop_count=len(result.inconsistent),
                    elapsed_ms=0 if args.stable_output else sat_ms,
                )
            )
            t0 = time.monotonic()
            solver_rounds = spoiler_min_rounds(
                inst.a, inst.b, args.k, max_positions=args.max_positions, threads=args.threads
            )
            game_ms = int((time.monotonic() - t0) * 1000)
            rows.append(
                dict(
                    k=args.k,
                    n=n,
                    m=m,
                    vertices_a=len(inst.a),
                    vertices_b=len(inst.b),
                    method="game",
                    depth="" if solver_rounds is None else solver_rounds,
                    prop_count=len(result.inconsistent),
                    elapsed_ms=0 if args.stable_output else game_ms,
                )
            )
    fields = ["k", "n", "m", "vertices_a", "vertices_b", "method", "depth", "prop_count", "elapsed_ms"]
    out = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.csv:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="propdepth",
        description="Propagation-depth laboratory for bounded-width saturation and pebble games.",
    )
    parser.add_argument("--version", action="version", version=f"propdepth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a hard instance pair")
    p.add_argument("--k", type=int, required=True, help="pebble count, at least 3")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("consistency", help="run the saturation engine on two .struct files")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mode", choices=[PARALLEL, "fifo"], default=PARALLEL)
    p.add_argument("--emit-derivation", metavar="PATH")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("game", help="solve the existential pebble game exactly")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--max-positions", type=int, default=10**8)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("verify", help="verify emitted artifacts")
    vsub = p.add_subparsers(dest="artifact", required=True)
    pv = vsub.add_parser("derivation", help="check a derivation file")
    pv.add_argument("a")
    pv.add_argument("b")
    pv.add_argument("derivation")
    pv.set_defaults(func=cmd_verify_derivation)
    pv = vsub.add_parser("strategy", help="check a strategy file")
    pv.add_argument("--k", type=int, required=True)
    pv.add_argument("a")
    pv.add_argument("b")
    pv.add_argument("strategy")
    pv.set_defaults(func=cmd_verify_strategy)

    p = sub.add_parser("experiment", help="depth sweep over an n x m grid, CSV output")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", default="1,2", help="comma-separated list of n values")
    p.add_argument("--m", default="1,2", help="comma-separated list of m values")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-positions", type=int, default=10**8)
    p.add_argument(
        "--stable-output",
        action="store_true",
        help="zero the elapsed_ms column for byte-reproducible output",
    )
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StructureError, ValueError, ResourceLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
