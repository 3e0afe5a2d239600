"""Command-line front end.

Spectra are given in the order lambda_00, lambda_01, lambda_10, lambda_11
(label = amp bit then phase bit).  Numbers are printed with 12 significant
digits.  Exit status is 0 on success, 2 for bad arguments and 3 when a
computation fails.  Diagnostics go to stderr; data goes to stdout or --out.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bellcore import BlockDist, tensor_power, werner_spectrum
from .bootstrap import bootstrap_csv, bootstrap_row
from .montecarlo import EXACT, MAX_ENUM_PAIRS, SAMPLED, entropy_curve
from .protocol import best_recurrence_then_hash, hashing_yield, rate_2copy, rate_asymptotic_recurrence
from .search import CURVE_COLUMNS, MAX_PAIRS, SearchConfig, optimize, werner_curve
from .trees import dumps

FMT = ".12g"
SPECTRUM_TOL = 1e-9
EXIT_USAGE = 2
EXIT_COMPUTE = 3


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), FMT)


# ---------------------------------------------------------------------------
# Argument parsing helpers


def parse_spectrum(text: str) -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"malformed spectrum {text!r}") from None
    if values.size != 4:
        raise UsageError(f"spectrum needs 4 values, got {values.size}")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise UsageError("spectrum entries must be finite and nonnegative")
    if abs(values.sum() - 1.0) > SPECTRUM_TOL:
        raise UsageError(f"spectrum sums to {values.sum()!r}, not 1")
    return values / values.sum()


def parse_fidelity(text: str, entangled: bool) -> float:
    try:
        f = float(text)
    except ValueError:
        raise UsageError(f"malformed fidelity {text!r}") from None
    if entangled and not 0.5 < f <= 1.0:
        raise UsageError(f"fidelity {f} is outside the entangled Werner range (1/2, 1]")
    if not 0.0 <= f <= 1.0:
        raise UsageError(f"fidelity {f} is outside [0, 1]")
    return f


def parse_grid(text: str) -> list:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError("grid needs step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    grid = [round(lo + i * step, 12) for i in range(count)]
    for f in grid:
        if not 0.5 < f <= 1.0:
            raise UsageError(f"grid point {f} is outside the entangled Werner range (1/2, 1]")
    return grid


def parse_count(text: str) -> int:
    """Integer count, accepting forms like 1e8."""
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"malformed count {text!r}") from None
    if not value.is_integer() or value < 1:
        raise UsageError(f"count must be a positive integer, got {text!r}")
    return int(text) if text.isdigit() else int(value)


def parse_seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("seed must fit in an unsigned 64-bit integer")
    return seed


def positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise UsageError(f"--{name} must be positive")
    return value


def single_pair_input(args, entangled: bool) -> np.ndarray:
    if args.spectrum is not None:
        return parse_spectrum(args.spectrum)
    return werner_spectrum(parse_fidelity(args.werner, entangled))


def write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def search_config(args) -> SearchConfig:
    if not 1 <= args.copies <= MAX_PAIRS:
        raise UsageError(f"--copies must be in 1..{MAX_PAIRS}")
    return SearchConfig(max_pairs=max(args.copies, 1), relabelings=not args.no_relabel,
                        max_depth=args.max_depth, beam_width=args.beam_width)


# ---------------------------------------------------------------------------
# Subcommands


def rate_values(spectrum) -> dict:
    d1 = BlockDist.from_spectrum(spectrum)
    return {
        "hash": hashing_yield(d1),
        "asym_rec": rate_asymptotic_recurrence(d1),
        "two_copy": rate_2copy(d1),
        "rec_hash": best_recurrence_then_hash(d1).rate,
    }


def cmd_rate(args) -> str:
    values = rate_values(single_pair_input(args, entangled=False))
    return ",".join(values) + "\n" + ",".join(fmt(v) for v in values.values()) + "\n"


def cmd_curve(args) -> str:
    grid = parse_grid(args.grid) if args.grid else [parse_fidelity(args.werner, True)]
    table = werner_curve(grid, search_config(args), copies=args.copies)
    if args.trees:
        folder = Path(args.trees)
        folder.mkdir(parents=True, exist_ok=True)
        for f, tree in zip(grid, table.trees):
            (folder / f"tree_f{f:.12g}.txt").write_text(dumps(tree))
    for column, lo, hi in table.violations:
        print(f"warning: {column} decreases between f={lo:g} and f={hi:g}", file=sys.stderr)
    lines = [",".join(CURVE_COLUMNS)]
    lines += [",".join(fmt(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def cmd_search(args) -> str:
    spectrum = single_pair_input(args, entangled=args.spectrum is None)
    result = optimize(tensor_power(BlockDist.from_spectrum(spectrum), args.copies), search_config(args))
    tree = dumps(result.best_tree)
    if args.out is not None:
        Path(args.out).write_text(tree)
        return f"best_rate,{fmt(result.best_rate)}\n"
    return f"best_rate,{fmt(result.best_rate)}\n" + tree


def cmd_simulate(args) -> str:
    spectrum = single_pair_input(args, entangled=False)
    if not 1 <= args.n <= MAX_ENUM_PAIRS:
        raise UsageError(f"--n must be in 1..{MAX_ENUM_PAIRS}")
    if not 0 <= args.checks <= 2 * args.n:
        raise UsageError(f"--checks must be in 0..{2 * args.n} for n={args.n}")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    curve = entropy_curve(spectrum, args.n, args.checks, args.trials, parse_seed(args.seed),
                          method=args.method)
    return curve.to_csv()


def cmd_bootstrap(args) -> str:
    r, k = positive("r", args.r), positive("k", args.k)
    kerr, c = positive("kerr", args.kerr), positive("c", args.c)
    rows = [bootstrap_row(parse_count(n), k, r, kerr, c) for n in args.n.split(",")]
    return bootstrap_csv(rows)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdistill",
        description="Distillation rates for Bell-diagonal states. "
                    "Spectra are ordered lambda_00,lambda_01,lambda_10,lambda_11.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def state_args(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--spectrum", help="four eigenvalues a,b,c,d summing to 1")
        g.add_argument("--werner", help="Werner fidelity f")
        return g

    def search_args(p):
        p.add_argument("--copies", type=int, default=2, help="copies per block for the search")
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--beam-width", type=int, default=None)
        p.add_argument("--no-relabel", action="store_true",
                       help="search without label maps before measurements")

    p = sub.add_parser("rate", help="closed-form rates of the reference protocols")
    state_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("curve", help="rate table along the Werner line (CSV)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", help="lo:hi:step, inside (1/2, 1]")
    g.add_argument("--werner", help="single Werner fidelity")
    search_args(p)
    p.add_argument("--trees", help="directory for the best tree at each grid point")
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("search", help="optimal protocol tree on a block of copies")
    state_args(p)
    search_args(p)
    p.add_argument("--out", help="file for the best tree (rate still goes to stdout)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("simulate", help="residual entropy after random parity checks (CSV)")
    state_args(p, required=False)
    p.add_argument("--n", type=int, default=8, help="pairs in the sampled string (<= 10)")
    p.add_argument("--checks", type=int, default=16)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", default="0")
    p.add_argument("--method", choices=(EXACT, SAMPLED), default=EXACT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate, werner="0.8")

    p = sub.add_parser("bootstrap", help="assisted-to-unassisted schedule and success bound (CSV)")
    p.add_argument("--r", type=float, required=True, help="assisted rate")
    p.add_argument("--k", type=float, required=True, help="activating protocol rate")
    p.add_argument("--n", required=True, help="copy count(s), comma separated; 1e8 style allowed")
    p.add_argument("--kerr", type=float, default=2.0, help="typicality prefactor")
    p.add_argument("--c", type=float, default=0.01, help="typicality exponent")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bootstrap)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.func(args)
        if args.command == "search":
            sys.stdout.write(text)
        else:
            write_output(text, args.out)
    except UsageError as exc:
        print(f"bdistill {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any library failure is a computational error
        print(f"bdistill {args.command}: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return 0


if __name__ == "__main__":
    sys.exit(main())
