"""Command line interface: ``flipsearch {search,verify,convert,extend,table}``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 target rank not met, 4 unverifiable start scheme.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bounds import results_table
from .scheme_io import SchemeFormatError, read_scheme, save_scheme
from .search import (
    SearchParams,
    UnverifiedSchemeError,
    combined_search,
    default_walkers,
    extend_scheme,
    marakov_to_commutative,
    parallel_search,
    split_budget,
)
from .tensors import Dims, Mode, coordinate_name, residual, standard_scheme

EXIT_OK, EXIT_UNVERIFIED, EXIT_USAGE, EXIT_UNMET, EXIT_BAD_START = 0, 1, 2, 3, 4

MODES = ["standard", "marakov", "commutative", "combined"]


def _positive(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flipsearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="random walk for a low-rank scheme")
    p.add_argument("--l", type=_positive)
    p.add_argument("--m", type=_positive)
    p.add_argument("--n", type=_positive)
    p.add_argument("--mode", choices=MODES, default="standard")
    p.add_argument("--start", type=Path, help="start from this scheme file")
    p.add_argument("--iterations", type=_positive, default=1_000_000)
    p.add_argument("--plus-interval", type=_positive)
    p.add_argument("--plus-cap", type=_nonneg)
    p.add_argument("--target-rank", type=_nonneg)
    p.add_argument("--seed", type=_nonneg)
    p.add_argument("--walkers", type=_positive, default=None)
    p.add_argument("--restarts", type=_nonneg, default=0)
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--report", type=Path, help="report JSON path (default: <output>.json)")
    p.add_argument("--progress-every", type=float, default=2.0, metavar="SECONDS")
    p.add_argument("--quiet", "-q", action="store_true")

    p = sub.add_parser("verify", help="check that a scheme file sums to its target")
    p.add_argument("--input", "-i", type=Path, required=True)

    p = sub.add_parser("convert", help="turn a Marakov-like scheme into a commutative one")
    p.add_argument("--input", "-i", type=Path, required=True)
    p.add_argument("--output", "-o", type=Path, required=True)

    p = sub.add_parser("extend", help="grow a scheme by one along an axis")
    p.add_argument("--input", "-i", type=Path, required=True)
    p.add_argument("--axis", choices=["l", "m", "n"], required=True)
    p.add_argument("--output", "-o", type=Path, required=True)

    p = sub.add_parser("table", help="print the closed-form commutative bounds")
    p.add_argument("--max", type=int, default=5, dest="max_size")
    p.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def _err(msg: str):
    print(f"flipsearch: {msg}", file=sys.stderr)


def _load(path: Path):
    """Parse a scheme file, mapping failures to exit codes."""
    try:
        return read_scheme(path)
    except OSError as e:
        _err(str(e))
        raise SystemExit(EXIT_USAGE)
    except SchemeFormatError as e:
        _err(f"{path}: {e}")
        raise SystemExit(EXIT_USAGE)


def cmd_search(args, parser) -> int:
    mode = args.mode
    start = None
    if args.start is not None:
        sf = _load(args.start)
        if not sf.verified:
            _err(f"{args.start}: start scheme does not verify")
            return EXIT_BAD_START
        start = sf.scheme
        want = Mode.MARAKOV if mode == "combined" else Mode(mode)
        if start.mode is not want:
            parser.error(f"--start holds a {start.mode} scheme but --mode is {mode}")
        dims = start.dims
    else:
        if None in (args.l, args.m, args.n):
            parser.error("search needs --l, --m and --n (or --start)")
        dims = Dims(args.l, args.m, args.n)

    seed = args.seed if args.seed is not None else int.from_bytes(os.urandom(8), "little") >> 1
    walkers = args.walkers or default_walkers()
    output = args.output or Path(f"{mode}-{dims.l}x{dims.m}x{dims.n}.mmscheme")
    report_path = args.report or output.with_name(output.name + ".json")
    params = SearchParams(
        max_iterations=args.iterations,
        plus_interval=args.plus_interval,
        plus_cap=args.plus_cap,
        target_rank=args.target_rank,
        seed=seed,
        restarts=args.restarts,
        walkers=walkers,
        checkpoint=str(output),
        progress_every=args.progress_every,
    )

    def progress(rec):
        print(json.dumps(rec), file=sys.stderr, flush=True)

    prog = None if args.quiet else progress
    if mode == "combined":
        p_m, p_c = split_budget(params)
        report = combined_search(dims, p_m, p_c, start=start, progress=prog)
    else:
        if start is None:
            start = standard_scheme(dims, Mode(mode))
        report = parallel_search(start, params, progress=prog)

    save_scheme(report.best_scheme, output)
    info = report.to_dict()
    info["seed"] = seed
    info["output"] = str(output)
    report_path.write_text(json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps({k: info[k] for k in ("best_rank", "iterations_used", "seed", "wall_time", "output")}))
    if args.target_rank is not None and report.best_rank > args.target_rank:
        return EXIT_UNMET
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    sf = _load(args.input)
    if sf.verified:
        print(f"VERIFIED rank={sf.rank}")
        return EXIT_OK
    bad = residual(sf.scheme)
    first = tuple(int(x) for x in bad[0])
    print(
        f"NOT VERIFIED rank={sf.rank}: {len(bad)} wrong coordinates, first {first} "
        f"({coordinate_name(sf.scheme, first)})"
    )
    return EXIT_UNVERIFIED


def cmd_convert(args, parser) -> int:
    sf = _load(args.input)
    if sf.mode is not Mode.MARAKOV:
        _err(f"convert expects a marakov scheme, got {sf.mode}")
        return EXIT_USAGE
    if not sf.verified:
        _err(f"{args.input}: scheme does not verify")
        return EXIT_UNVERIFIED
    out = marakov_to_commutative(sf.scheme)
    save_scheme(out, args.output)
    print(f"wrote commutative scheme of rank {out.rank} to {args.output}")
    return EXIT_OK


def cmd_extend(args, parser) -> int:
    sf = _load(args.input)
    if not sf.verified:
        _err(f"{args.input}: scheme does not verify")
        return EXIT_UNVERIFIED
    out = extend_scheme(sf.scheme, args.axis)
    save_scheme(out, args.output)
    d = out.dims
    print(f"wrote ({d.l},{d.m},{d.n}) {out.mode} scheme of rank {out.rank} to {args.output}")
    return EXIT_OK


def cmd_table(args, parser) -> int:
    if args.max_size < 2:
        parser.error("--max must be at least 2")
    rows = results_table(args.max_size)
    if args.format == "json":
        print(json.dumps([{"l": r.l, "m": r.m, "n": r.n, "bound": r.improved} for r in rows]))
    else:
        print("l m n bound")
        for r in rows:
            print(f"{r.l} {r.m} {r.n} {r.improved}")
    return EXIT_OK


COMMANDS = {
    "search": cmd_search,
    "verify": cmd_verify,
    "convert": cmd_convert,
    "extend": cmd_extend,
    "table": cmd_table,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, parser)
    except UnverifiedSchemeError as e:
        _err(str(e))
        return EXIT_BAD_START
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
