"""Command-line front end: build, query, verify, encode/decode, bench.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 I/O error.
All commands are thin wrappers over the library.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time

from .bitstream import BitStream
from .errors import DecodeError, InvalidArgument, InvalidInput
from . import fastpath as fp
from . import recompress as rc
from . import runs as rn
from . import sparsecodec as sc
from . import syncset as ss
from . import transducer as td
from .oracle import TextIndex, verify_sync
from .text import PackedText

MAX_TABLE_N = 1 << 24


class UsageError(Exception):
    pass


def _read_symbols(args) -> tuple[list[int], int]:
    try:
        if args.decimal:
            pairs = []
            with open(args.input) as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    idx, sym = line.split()
                    pairs.append((int(idx), int(sym)))
            pairs.sort()
            if [i for i, _ in pairs] != list(range(len(pairs))):
                raise UsageError("decimal input must list indices 0..n-1")
            symbols = [s for _, s in pairs]
        else:
            with open(args.input, "rb") as fh:
                symbols = list(fh.read())
    except OSError as exc:
        raise exc
    sigma = args.sigma
    if sigma is None:
        sigma = (max(symbols) + 1) if args.decimal and symbols else 256
    return symbols, sigma


def _packed(args) -> PackedText:
    symbols, sigma = _read_symbols(args)
    table_n = args.table_n
    if not 2 <= table_n <= MAX_TABLE_N:
        raise UsageError(f"--table-n must lie in [2..{MAX_TABLE_N}]")
    return PackedText(symbols, sigma, table_n=table_n)


def _write_lines(path, values):
    text = "".join(f"{v}\n" for v in values)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_container(path, stream: BitStream, decoded_len: int):
    data = stream.to_bytes(decoded_len)
    if path is None:
        sys.stdout.buffer.write(data)
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def cmd_sync(args) -> int:
    t = _packed(args)
    if args.tau < 1 or args.tau > t.n // 2:
        raise UsageError(f"--tau must lie in [1..{t.n // 2}]")
    handle = fp.FastSyncIndex(t, threshold=args.fallback_threshold)
    if args.format == "list":
        members = ss.build_sync_explicit(handle.sync_index, args.tau)
        enc = None
    elif args.format == "bitmask":
        mask = ss.build_sync_bitmask(handle.sync_index, args.tau)
        members = [i for i in range(t.n) if mask.get_bit(i)]
        enc = sc.SparseEncoding(mask, t.n)
    else:
        enc = handle.sync_sparse(args.tau)
        members = [i for i, b in enumerate(sc.senc_decode(enc)) if b]
    if args.verify:
        report = verify_sync(t.text(), args.tau, members, TextIndex(t.text()))
        if not report.ok:
            print(f"verification failed: {report.condition}: {report.detail}",
                  file=sys.stderr)
            return 1
    if args.support and args.format == "sparse":
        support = handle.sync_with_support(args.tau)
        enc = support.encoding
    if args.format == "list":
        _write_lines(args.out, members)
    else:
        _write_container(args.out, enc.stream, enc.decoded_len)
    return 0


def cmd_recompress(args) -> int:
    t = _packed(args)
    index = rc.RecompressionIndex(t, threshold=args.fallback_threshold)
    if args.format == "list":
        _write_lines(args.out, index.level_list(args.level))
    else:
        mask = index.level_bitmask(args.level)
        _write_container(args.out, mask, t.n)
    return 0


def cmd_runs(args) -> int:
    t = _packed(args)
    if args.format == "list":
        found = rn.enumerate_runs(t, args.ell, args.period)
        _write_lines(args.out, (f"{r.start} {r.end} {r.period}" for r in found))
    else:
        mask = rn.runs_bitmask(t, args.ell, args.period)
        _write_container(args.out, mask, len(mask))
    return 0


def cmd_encode(args) -> int:
    with open(args.input) as fh:
        values = [int(token) for token in fh.read().split()]
    enc = sc.senc_encode(values)
    _write_container(args.out, enc.stream, enc.decoded_len)
    return 0


def cmd_decode(args) -> int:
    with open(args.input, "rb") as fh:
        stream, decoded_len = BitStream.from_bytes(fh.read())
    values = sc.senc_decode(sc.SparseEncoding(stream, decoded_len))
    _write_lines(args.out, values)
    return 0


def cmd_query(args) -> int:
    with open(args.container, "rb") as fh:
        stream, decoded_len = BitStream.from_bytes(fh.read())
    enc = sc.SparseEncoding(stream, decoded_len)
    if args.select is not None:
        from .ranksupport import build_select
        print(build_select(enc, args.table_n).select(args.select))
    if args.rank is not None:
        from .ranksupport import build_rank
        print(build_rank(enc, args.table_n).rank(args.rank))
    return 0


def cmd_verify(args) -> int:
    t = _packed(args)
    try:
        with open(args.set, "rb") as fh:
            data = fh.read()
        if data[:4] == b"SSB1":
            stream, decoded_len = BitStream.from_bytes(data)
            bits = sc.senc_decode(sc.SparseEncoding(stream, decoded_len))
            members = [i for i, b in enumerate(bits) if b]
        else:
            members = [int(line) for line in data.decode().split()]
    except (DecodeError, UnicodeDecodeError, ValueError) as exc:
        print(f"unreadable set: {exc}", file=sys.stderr)
        return 1
    report = verify_sync(t.text(), args.tau, members, TextIndex(t.text()))
    if not report.ok:
        print(f"verification failed: {report.condition}: {report.detail}",
              file=sys.stderr)
        return 1
    print("ok")
    return 0


def cmd_bench(args) -> int:
    if args.generate:
        rng = random.Random(args.seed)
        sigma = args.sigma if args.sigma else 4
        symbols = [rng.randrange(sigma) for _ in range(args.generate)]
        table_n = args.table_n
        if not 2 <= table_n <= MAX_TABLE_N:
            raise UsageError(f"--table-n must lie in [2..{MAX_TABLE_N}]")
        t = PackedText(symbols, sigma, table_n=table_n)
    else:
        if args.input is None:
            raise UsageError("bench needs an input file or --generate")
        t = _packed(args)
    taus = [int(x) for x in args.tau_list.split(",")]
    handle = None
    writer = csv.writer(sys.stdout if args.out is None else open(args.out, "w"))
    writer.writerow(["n", "sigma", "tau", "repr", "bits", "build_ns", "query_ns"])
    start = time.perf_counter_ns()
    handle = fp.FastSyncIndex(t, threshold=args.fallback_threshold)
    build_ns = time.perf_counter_ns() - start
    for tau in taus:
        if tau < 1 or tau > t.n // 2:
            continue
        start = time.perf_counter_ns()
        enc = handle.sync_sparse(tau)
        query_ns = time.perf_counter_ns() - start
        writer.writerow([t.n, t.sigma_in, tau, "sparse", len(enc.stream),
                         build_ns, query_ns])
        start = time.perf_counter_ns()
        members = ss.build_sync_explicit(handle.sync_index, tau)
        query_ns = time.perf_counter_ns() - start
        writer.writerow([t.n, t.sigma_in, tau, "list", 64 * len(members),
                         build_ns, query_ns])
    return 0


def cmd_transduce(args) -> int:
    with open(args.input) as fh:
        values = [int(token) for token in fh.read().split()]
    if args.program == "decrement":
        spec = td.TransducerSpec(1, 0, 1,
                                 lambda s, x: (0, x - 1 if x else 0),
                                 key="cli:decrement")
    else:
        bound = args.threshold
        spec = td.TransducerSpec(1, 0, 1,
                                 lambda s, x: (0, 1 if x >= bound else 0),
                                 key=f"cli:threshold:{bound}")
    enc = td.run_sparse(spec, sc.senc_encode(values), args.table_n)
    _write_lines(args.out, sc.senc_decode(enc))
    return 0


def _add_common(p: argparse.ArgumentParser, needs_text: bool = True,
                text_optional: bool = False):
    if needs_text:
        if text_optional:
            p.add_argument("input", nargs="?", default=None,
                           help="input file (raw bytes, or --decimal)")
        else:
            p.add_argument("input", help="input file (raw bytes, or --decimal)")
        p.add_argument("--decimal", action="store_true",
                       help="input is a two-column 'index symbol' text file")
        p.add_argument("--sigma", type=int, default=None,
                       help="declared alphabet size (default 256 / max+1)")
        p.add_argument("--fallback-threshold", type=int, default=256,
                       help="packed paths engage when log_sigma(n) reaches this")
    p.add_argument("--table-n", type=int, default=1 << 16,
                   help="lookup-table budget parameter N")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tausync",
        description="tau-synchronizing sets over packed texts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sync", help="build a synchronizing set")
    _add_common(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--format", choices=["list", "bitmask", "sparse"],
                   default="list")
    p.add_argument("--support", action="store_true",
                   help="attach rank/select support (sparse format)")
    p.add_argument("--verify", action="store_true",
                   help="check the result against the reference conditions")
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("recompress", help="report one boundary level")
    _add_common(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--format", choices=["list", "bitmask"], default="list")
    p.set_defaults(func=cmd_recompress)

    p = sub.add_parser("runs", help="report length/period-filtered runs")
    _add_common(p)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--format", choices=["list", "bitmask"], default="list")
    p.set_defaults(func=cmd_runs)

    p = sub.add_parser("encode", help="sparse-encode a decimal array")
    _add_common(p, needs_text=False)
    p.add_argument("input", help="whitespace-separated integers")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a sparse container")
    _add_common(p, needs_text=False)
    p.add_argument("input", help="container file")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("query", help="rank/select against a container")
    _add_common(p, needs_text=False)
    p.add_argument("container")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--select", type=int, default=None)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("verify", help="verify a stored synchronizing set")
    _add_common(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--set", required=True, help="set file (list or container)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="timing and size report as CSV")
    _add_common(p, text_optional=True)
    p.add_argument("--tau-list", required=True,
                   help="comma-separated tau values")
    p.add_argument("--generate", type=int, default=None, metavar="N",
                   help="bench a generated random text of N symbols")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for generated bench texts")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("transduce", help="demo transducer over an array")
    _add_common(p, needs_text=False)
    p.add_argument("input", help="whitespace-separated integers")
    p.add_argument("--program", choices=["decrement", "threshold"],
                   default="decrement")
    p.add_argument("--threshold", type=int, default=1)
    p.set_defaults(func=cmd_transduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        table_n = getattr(args, "table_n", None)
        if table_n is not None and not 2 <= table_n <= MAX_TABLE_N:
            raise UsageError(f"--table-n must lie in [2..{MAX_TABLE_N}]")
        return args.func(args)
    except (UsageError, InvalidArgument, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
