"""Benchmark harness: build / probe / join / bin-count sweeps written as CSV.

Usage::

    python -m hashgraph.bench build --algo hg_v1,hg_v2 --n 1048576 --load 0.5,1,2
    python -m hashgraph.bench probe --mult 1,8,32 --trials 3 --out probe.csv
    python -m hashgraph.bench join --mult 1,32 --algo probe_standard,probe_new,sort_merge
    python -m hashgraph.bench bins --n 1048576 --mult 1,32
    python -m hashgraph.bench gen --n 65536 --mult 8 --seed 7 --out keys.bin

Each configuration runs once untimed (that run is validated) and then
``--trials`` timed runs; the reported time is their median. Input
generation and file I/O are never timed.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
import time
from fractions import Fraction
from typing import Callable

import numpy as np

from hashgraph.baselines import (
    chain_build,
    chain_join_count,
    oa_build,
    oa_join_count,
    sort_merge_join_count,
)
from hashgraph.core import BuildConfig, HashGraph, InvariantError, build_v1, build_v2
from hashgraph.join import DEFAULT_PAIR_CAP, intersect_tables, probe_new, probe_standard, shared_vertex_count
from hashgraph.keygen import KeyFileError, KeySpec, generate, read_keys, write_keys
from hashgraph.parallel import thread_count

COLUMNS = [
    "experiment", "algo", "n", "load_factor", "bins", "multiplicity", "seed",
    "trials", "threads", "median_seconds", "keys_per_second", "match_count", "truncated",
]

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3

ALGOS = {
    "build": ("hg_v1", "hg_v2", "oa", "chain"),
    "probe": ("probe_standard", "probe_new"),
    "join": ("probe_standard", "probe_new", "oa", "chain", "sort_merge"),
    "bins": ("hg_v2",),
}
DEFAULT_ALGOS = {
    "build": "hg_v1,hg_v2",
    "probe": "probe_standard,probe_new",
    "join": "probe_standard,probe_new",
    "bins": "hg_v2",
}
DEFAULT_BIN_SWEEP = ",".join(str(2**k) for k in range(10, 19))


class UsageError(Exception):
    pass


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rationals(text: str) -> list[Fraction]:
    try:
        values = [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a comma list of rationals, got {text!r}") from None
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"values must be positive, got {text!r}")
    return values


def _ints(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"values must be >= 1, got {text!r}")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= value < 2**63:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^63)")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hashgraph-bench", description="HashGraph benchmark sweeps (CSV output).")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("build", "probe", "join", "bins"):
        p = sub.add_parser(name)
        p.add_argument("--n", type=_positive_int, default=2**16, help="keys per input")
        p.add_argument("--algo", default=DEFAULT_ALGOS[name], help="comma list of algorithms")
        p.add_argument("--load", type=_rationals, default=[Fraction(1)], help="comma list of load factors")
        p.add_argument(
            "--bins",
            type=_ints,
            default=_ints(DEFAULT_BIN_SWEEP) if name == "bins" else [2**15],
            help="comma list of bin counts",
        )
        p.add_argument("--mult", type=_rationals, default=None, help="comma list of multiplicities (uniform input)")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--trials", type=_positive_int, default=5)
        p.add_argument("--input", default=None, help="key file for input A")
        p.add_argument("--input-b", default=None, help="key file for input B")
        p.add_argument("--materialize", action="store_true")
        p.add_argument("--cap", type=_positive_int, default=DEFAULT_PAIR_CAP)
        p.add_argument("--out", default="-", help="CSV path, or - for stdout")
    g = sub.add_parser("gen")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--mult", type=_rationals, default=None, help="multiplicity; omit for the sequence 1..n")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out", required=True, help="key file path")
    return parser


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else repr(float(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _timed(fn: Callable[[], object], trials: int):
    result = fn()
    times = []
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return result, max(statistics.median(times), 1e-9)


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


class _Inputs:
    """Input arrays for one multiplicity setting."""

    def __init__(self, args, mult: Fraction | None):
        if args.input:
            self.a = read_keys(args.input)
            self.b = read_keys(args.input_b) if args.input_b else self.a
            self.mult = ""
        elif mult is None:
            self.a = generate(KeySpec.sequence(args.n))
            self.b = self.a
            self.mult = "1"
        else:
            self.a = generate(KeySpec.uniform(args.n, mult, args.seed))
            self.b = generate(KeySpec.uniform(args.n, mult, args.seed + 1))
            self.mult = _num(mult)
        if self.a.shape[0] == 0:
            raise UsageError("input A is empty")


def _row(args, experiment, algo, n, load, bins, mult, seconds, rate, match_count="", truncated=""):
    return {
        "experiment": experiment,
        "algo": algo,
        "n": n,
        "load_factor": _num(load),
        "bins": bins,
        "multiplicity": mult,
        "seed": args.seed,
        "trials": args.trials,
        "threads": thread_count(),
        "median_seconds": repr(float(seconds)),
        "keys_per_second": repr(float(rate)),
        "match_count": match_count,
        "truncated": "" if truncated == "" else str(bool(truncated)).lower(),
    }


def _validate_table(hg: HashGraph, what: str) -> None:
    try:
        hg.check_invariants()
    except InvariantError as e:
        raise ValidationError(f"{what}: {e}") from e


def _algos(args) -> list[str]:
    algos = [a.strip() for a in args.algo.split(",") if a.strip()]
    allowed = ALGOS[args.command]
    bad = [a for a in algos if a not in allowed]
    if bad or not algos:
        raise UsageError(f"--algo for {args.command} must be drawn from {','.join(allowed)}; got {args.algo!r}")
    return algos


def _mults(args) -> list[Fraction | None]:
    if args.input and args.mult:
        raise UsageError("--mult and --input are mutually exclusive")
    return list(args.mult) if args.mult else [None]


def cmd_build(args) -> list[dict]:
    algos = _algos(args)
    rows = []
    for mult in _mults(args):
        inp = _Inputs(args, mult)
        keys = inp.a
        n = keys.shape[0]
        for load in args.load:
            tables = {}
            for algo in algos:
                bin_list = args.bins if algo == "hg_v2" else [""]
                for bins in bin_list:
                    if algo == "hg_v1":
                        config = BuildConfig(load_factor=load)
                        table, t = _timed(lambda: build_v1(keys, config), args.trials)
                        _validate_table(table, f"hg_v1 load={load}")
                        tables.setdefault("hg_v1", table)
                    elif algo == "hg_v2":
                        V = BuildConfig(load_factor=load).num_vertices(n)
                        if bins > V:
                            _warn(f"bins={bins} exceeds V={V}; clamped")
                            bins = V
                        config = BuildConfig(load_factor=load, bin_count=bins)
                        table, t = _timed(lambda: build_v2(keys, config), args.trials)
                        _validate_table(table, f"hg_v2 load={load} bins={bins}")
                        tables.setdefault("hg_v2", table)
                    elif algo == "oa":
                        if load > 1:
                            _warn(f"open addressing needs load <= 1; skipping load={_num(load)}")
                            continue
                        table, t = _timed(lambda: oa_build(keys, float(load), args.seed), args.trials)
                        if table.occupied != n:
                            raise ValidationError(f"oa: {table.occupied} occupied slots for {n} keys")
                    else:
                        table, t = _timed(lambda: chain_build(keys, load, args.seed), args.trials)
                        if table.size != n:
                            raise ValidationError(f"chain: {table.size} reachable nodes for {n} keys")
                    rows.append(_row(args, "build", algo, n, load, bins, inp.mult, t, n / t))
            if "hg_v1" in tables and "hg_v2" in tables and not tables["hg_v1"].same_entries(tables["hg_v2"]):
                raise ValidationError(f"hg_v1 and hg_v2 disagree at load={load}")
    return rows


def _check_count(what: str, got: int, expected: int) -> None:
    if got != expected:
        raise ValidationError(f"{what}: match count {got} != oracle {expected}")


def cmd_probe(args) -> list[dict]:
    algos = _algos(args)
    bins = args.bins[0]
    rows = []
    for mult in _mults(args):
        inp = _Inputs(args, mult)
        a, b = inp.a, inp.b
        m = b.shape[0]
        oracle = sort_merge_join_count(a, b)
        for load in args.load:
            config = BuildConfig(load_factor=load, bin_count=bins)
            counts = {}
            for algo in algos:
                if algo == "probe_standard":
                    hg = build_v2(a, config)
                    _validate_table(hg, "probe table")
                    res, t = _timed(lambda: probe_standard(hg, b, args.materialize, args.cap), args.trials)
                else:
                    V = shared_vertex_count(a.shape[0], m, config)
                    hg_a = build_v2(a, config, num_vertices=V)
                    _validate_table(hg_a, "probe_new table A")
                    res, t = _timed(
                        lambda: intersect_tables(hg_a, build_v2(b, config, num_vertices=V), args.materialize, args.cap),
                        args.trials,
                    )
                    hg_b = build_v2(b, config, num_vertices=V)
                    _validate_table(hg_b, "probe_new table B")
                    expected = int(np.dot(hg_a.degrees(), hg_b.degrees()))
                    if res.comparisons != expected:
                        raise ValidationError(f"probe_new: {res.comparisons} comparisons, segments imply {expected}")
                _check_count(algo, res.match_count, oracle)
                counts[algo] = res.match_count
                rows.append(
                    _row(args, "probe", algo, m, load, min(bins, config.num_vertices(a.shape[0])), inp.mult,
                         t, m / t, res.match_count, res.truncated)
                )
            if len(set(counts.values())) > 1:
                raise ValidationError(f"probe algorithms disagree: {counts}")
    return rows


def cmd_join(args) -> list[dict]:
    algos = _algos(args)
    bins = args.bins[0]
    rows = []
    for mult in _mults(args):
        inp = _Inputs(args, mult)
        a, b = inp.a, inp.b
        total = a.shape[0] + b.shape[0]
        oracle = sort_merge_join_count(a, b)
        for load in args.load:
            config = BuildConfig(load_factor=load, bin_count=bins)
            for algo in algos:
                truncated = ""
                if algo == "probe_standard":
                    res, t = _timed(
                        lambda: probe_standard(build_v2(a, config), b, args.materialize, args.cap), args.trials
                    )
                    count, truncated = res.match_count, res.truncated
                elif algo == "probe_new":
                    res, t = _timed(lambda: probe_new(a, b, config, args.materialize, args.cap), args.trials)
                    count, truncated = res.match_count, res.truncated
                elif algo == "oa":
                    # a completely full table makes every miss scan all slots
                    if load >= 1:
                        _warn(f"open-addressing joins need load < 1; skipping load={_num(load)}")
                        continue
                    count, t = _timed(lambda: oa_join_count(oa_build(a, float(load), args.seed), b), args.trials)
                elif algo == "chain":
                    count, t = _timed(lambda: chain_join_count(chain_build(a, load, args.seed), b), args.trials)
                else:
                    count, t = _timed(lambda: sort_merge_join_count(a, b), args.trials)
                _check_count(algo, count, oracle)
                rows.append(_row(args, "join", algo, total, load, bins, inp.mult, t, total / t, count, truncated))
    return rows


def cmd_bins(args) -> list[dict]:
    _algos(args)
    rows = []
    for mult in _mults(args):
        inp = _Inputs(args, mult)
        keys = inp.a
        n = keys.shape[0]
        for load in args.load:
            reference = build_v1(keys, BuildConfig(load_factor=load))
            V = reference.num_vertices
            for bins in args.bins:
                if bins > V:
                    _warn(f"bins={bins} exceeds V={V}; clamped")
                    bins = V
                config = BuildConfig(load_factor=load, bin_count=bins)
                table, t = _timed(lambda: build_v2(keys, config), args.trials)
                _validate_table(table, f"bins={bins}")
                if not table.same_entries(reference):
                    raise ValidationError(f"bins={bins}: entries differ from the single-pass build")
                rows.append(_row(args, "bins", "hg_v2", n, load, bins, inp.mult, t, n / t))
    return rows


def cmd_gen(args) -> None:
    if args.mult is not None and len(args.mult) != 1:
        raise UsageError("gen takes a single --mult value")
    spec = KeySpec.sequence(args.n) if args.mult is None else KeySpec.uniform(args.n, args.mult[0], args.seed)
    write_keys(args.out, generate(spec))


COMMANDS = {"build": cmd_build, "probe": cmd_probe, "join": cmd_join, "bins": cmd_bins}


def write_csv(rows: list[dict], out) -> None:
    writer = csv.DictWriter(out, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        thread_count()
        if args.command == "gen":
            cmd_gen(args)
            return EXIT_OK
        if args.input_b and not args.input:
            raise UsageError("--input-b requires --input")
        rows = COMMANDS[args.command](args)
        if args.out == "-":
            write_csv(rows, sys.stdout)
        else:
            with open(args.out, "w", newline="") as f:
                write_csv(rows, f)
        return EXIT_OK
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"validation failure: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, KeyFileError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
