"""Command-line entry point: ``logbenford <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 computation error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import report
from .asymptotics import asymptotic_check, block_actual, block_expected
from .density import INTEGERS, oscillation_scan, run_density
from .digits import DigitParseError, expected_density, parse_digit_string
from .sieve import CacheError, PrimeCache, cache_load, cache_store
from .subsets import CLASS_FILTERS, QuadIdeals, SpecError, parse_subset_spec, theoretical_delta
from .tables import TABLES, reproduce

log = logging.getLogger("logbenford")

SUBSET_HELP = (
    "subset grammar: all | ap:a,q | poly:c0,c1,...,cn[;delta=r] | index:r,t | "
    "qfield:d[,all|split|inert|ramified]  (poly coefficients constant term first)"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def default_cache_path() -> Path:
    root = os.environ.get("LOGBENFORD_CACHE_DIR")
    base = Path(root) if root else Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "logbenford"
    return base / "primes.bfpc"


def open_cache(path: str | None, limit: int, threads: int) -> PrimeCache:
    """Load the cache file, (re)building and storing it when it is missing or too small."""
    explicit = path is not None
    target = Path(path) if explicit else default_cache_path()
    cache = None
    if target.exists():
        try:
            cache = cache_load(target)
        except CacheError:
            if explicit:
                raise
            log.warning("ignoring unreadable cache %s", target)
    if cache is not None and cache.limit >= limit:
        return cache
    cache = PrimeCache.build(max(limit, cache.limit if cache else 0), threads=threads)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        cache_store(cache, target)
    except OSError:
        if explicit:
            raise
        log.warning("could not write cache %s", target)
    return cache


def _int(text: str) -> int:
    try:
        v = float(text) if any(c in text for c in "eE.") else int(text)
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None
    if v != int(v):
        raise UsageError(f"not an integer: {text!r}")
    return int(v)


def parse_int_list(text: str) -> list[int]:
    return [_int(t) for t in text.split(",") if t.strip()]


def parse_checkpoints(text: str) -> list[int]:
    """Explicit ``x1,x2,...`` or geometric ``log:start,factor,count``."""
    if text.startswith("log:"):
        parts = text[4:].split(",")
        if len(parts) != 3:
            raise UsageError("geometric schedule is log:start,factor,count")
        try:
            start, factor, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad schedule {text!r}") from None
        if start < 3 or factor <= 1 or count < 1:
            raise UsageError("need start >= 3, factor > 1, count >= 1")
        cps = sorted({round(start * factor**i) for i in range(count)})
    else:
        cps = parse_int_list(text)
    if not cps:
        raise UsageError("no checkpoints given")
    if any(c < 3 for c in cps):
        raise UsageError("checkpoints must be >= 3")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise UsageError("checkpoints must be strictly ascending")
    return cps


def parse_delta(text: str) -> float:
    try:
        v = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad delta {text!r}") from None
    if v < 0:
        raise UsageError("delta must be >= 0")
    return v


def _limit(args, cps: list[int]) -> int:
    limit = args.limit if args.limit is not None else cps[-1]
    if limit < cps[-1]:
        raise UsageError(f"--limit {limit} is below the largest checkpoint {cps[-1]}")
    return limit


def _emit(args, csv_text: str, json_text: str) -> None:
    sys.stdout.write(json_text if args.format == "json" else csv_text)


def cmd_density(args) -> None:
    spec = parse_subset_spec(args.subset)
    ds = parse_digit_string(args.lead, args.base)
    cps = parse_checkpoints(args.checkpoints)
    limit = _limit(args, cps)
    cache = open_cache(args.cache, limit, args.threads)
    rep = run_density(spec, ds, cps, cache, args.threads)
    _emit(args, report.density_csv(rep), report.density_json(rep))


def cmd_ideals(args) -> None:
    spec = QuadIdeals(args.d, args.klass)
    ds = parse_digit_string(args.lead, args.base)
    cps = parse_checkpoints(args.checkpoints)
    limit = _limit(args, cps)
    cache = open_cache(args.cache, limit, args.threads)
    rep = run_density(spec, ds, cps, cache, args.threads)
    _emit(args, report.density_csv(rep), report.density_json(rep))


def cmd_table(args) -> None:
    if args.id not in TABLES:
        raise UsageError(f"unknown table {args.id!r}; choose from {', '.join(TABLES)}")
    limit = max(TABLES[args.id].checkpoints)
    cache = open_cache(args.cache, limit, args.threads)
    result = reproduce(args.id, cache, args.threads)
    _emit(args, report.table_csv(result), report.table_json(result))


def cmd_expected(args) -> None:
    delta = parse_delta(args.delta)
    ds = parse_digit_string(args.lead, args.base)
    value = expected_density(delta, ds)
    if args.format == "json":
        sys.stdout.write(report._json({"delta": report.num(delta), "digit_string": str(ds), "base": ds.base, "expected": report.num(value)}))
    else:
        sys.stdout.write(report.fmt(value) + "\n")


def cmd_asym(args) -> None:
    ds = parse_digit_string(args.lead, args.base)
    ns = parse_int_list(args.n)
    if not ns or min(ns) < 2:
        raise UsageError("--n values must be >= 2")
    checks = [asymptotic_check(ds.base, ds.value, n) for n in ns]
    _emit(args, report.asym_csv(checks), report.asym_json(checks))


def cmd_block(args) -> None:
    spec = parse_subset_spec(args.subset)
    ds = parse_digit_string(args.lead, args.base)
    if args.t < 1:
        raise UsageError("--t must be >= 1")
    S, b = ds.value, ds.base
    cache = open_cache(args.cache, (S + 1) * b**args.t, args.threads)
    delta = theoretical_delta(spec)
    actual = block_actual(spec, b, S, args.t, cache)
    expected = None if delta is None else block_expected(b, S, args.t, delta)
    diff = None if expected is None else actual - expected
    header = ("spec", "base", "lead", "t", "lo", "hi", "actual", "expected", "diff")
    row = (str(spec), b, str(ds), args.t, S * b**args.t, (S + 1) * b**args.t, actual, expected, diff)
    obj = dict(zip(header, row))
    for k in ("actual", "expected", "diff"):
        obj[k] = report.num(obj[k])
    _emit(args, report._csv(header, [row]), report._json(obj))


def cmd_oscillate(args) -> None:
    ds = parse_digit_string(args.lead, args.base)
    spec = INTEGERS if args.subset == INTEGERS else parse_subset_spec(args.subset)
    xs = parse_int_list(args.x)
    if not xs or min(xs) < 1:
        raise UsageError("--x values must be >= 1")
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise UsageError("--x values must be ascending")
    cache = None if spec == INTEGERS else open_cache(args.cache, max(xs[-1], 2), args.threads)
    stats = oscillation_scan(xs, ds, spec, cache)
    extra = {"spec": str(spec), "digit_string": str(ds), "base": ds.base}
    _emit(args, report.oscillation_csv(stats), report.oscillation_json(stats, extra))


def cmd_sieve(args) -> None:
    if args.limit < 2:
        raise UsageError("--limit must be >= 2")
    cache = open_cache(args.cache, args.limit, args.threads)
    count = cache.count(args.limit)
    path = args.cache or str(default_cache_path())
    if args.format == "json":
        sys.stdout.write(report._json({"limit": args.limit, "prime_count": count, "cache_limit": cache.limit, "cache": path}))
    else:
        sys.stdout.write(f"limit,prime_count,cache_limit\n{args.limit},{count},{cache.limit}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--cache", metavar="PATH", default=argparse.SUPPRESS, help="prime cache file")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (default: all cores)")

    parser = _Parser(prog="logbenford", description=__doc__, parents=[common], epilog=SUBSET_HELP)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def digit_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--base", type=int, default=10)
        p.add_argument("--lead", required=True, help="leading digit string S, e.g. 1 or 19")

    p = sub.add_parser("density", parents=[common], help="logarithmic density report", epilog=SUBSET_HELP)
    p.add_argument("--subset", required=True)
    digit_args(p)
    p.add_argument("--limit", type=int)
    p.add_argument("--checkpoints", required=True, help="x1,x2,... or log:start,factor,count")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("ideals", parents=[common], help="density over prime ideals of Q(sqrt d)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--class", dest="klass", choices=CLASS_FILTERS, default="all")
    digit_args(p)
    p.add_argument("--limit", type=int)
    p.add_argument("--checkpoints", required=True)
    p.set_defaults(func=cmd_ideals)

    p = sub.add_parser("table", parents=[common], help="reproduce a published table")
    p.add_argument("id", help="ex14a | ex14b")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("expected", parents=[common], help="delta * log_b(1 + 1/S)")
    p.add_argument("--delta", required=True, help="real or fraction, e.g. 1/7")
    digit_args(p)
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("asym", parents=[common], help="digit-ratio product vs Gamma asymptote")
    digit_args(p)
    p.add_argument("--n", required=True, help="one or more n, comma separated")
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("block", parents=[common], help="sum over one digit block [S b^t, (S+1) b^t)", epilog=SUBSET_HELP)
    p.add_argument("--subset", required=True)
    digit_args(p)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("oscillate", parents=[common], help="natural-density ratios", epilog=SUBSET_HELP)
    p.add_argument("--subset", required=True, help="subset spec or 'integers'")
    digit_args(p)
    p.add_argument("--x", required=True, help="ascending x values, comma separated")
    p.set_defaults(func=cmd_oscillate)

    p = sub.add_parser("sieve", parents=[common], help="build the prime cache")
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(func=cmd_sieve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = getattr(args, "format", "csv")
    args.cache = getattr(args, "cache", None)
    args.threads = getattr(args, "threads", None)
    if args.threads is None:
        args.threads = os.cpu_count() or 1
    if args.threads < 1:
        print("logbenford: error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        args.func(args)
    except (UsageError, DigitParseError, SpecError) as exc:
        print(f"logbenford: error: {exc}", file=sys.stderr)
        return 1
    except (CacheError, OSError, ValueError, ArithmeticError) as exc:
        print(f"logbenford: computation failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
