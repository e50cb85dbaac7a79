"""Command-line entry point: ``andrica-lab {verify,stats,bounds,general,records,catalog}``.

Exit status: 0 on success (including expected-false claims failing as
expected), 1 when an expected-true claim or a published bound is violated,
2 on usage errors, 3 on runtime errors (I/O, corrupt checkpoints).
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator

from .bounds import check_bounds
from .claims import ClaimId, claim_catalog
from .errors import AndricaLabError, ConfigError, DomainError, UnknownClaimError
from .gaps import StatsBlock, fraction_below_one
from .generalized import check_generalized, threshold_n0
from .runner import DEFAULT_VERIFY_LIMIT, RunConfig, RunState, checkpoint_resume
from .sieve import DEFAULT_SEGMENT_SIZE

CSV_HEADER = "n,p_n,p_next,g,h,g_bar,h_bar"
CSV_ROW = "{},{},{},{},{:.15g},{:.15g},{:.15g}\n"


def _int(text: str) -> int:
    """Integers, also written as 1e8 or 10**8."""
    text = text.strip()
    if "**" in text:
        base, exp = text.split("**", 1)
        return int(base) ** int(exp)
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if value != int(value):
            raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
        return int(value)


def _claims(text: str) -> list[ClaimId]:
    try:
        return [ClaimId.parse(t) for t in text.split(",") if t.strip()]
    except UnknownClaimError as exc:
        raise argparse.ArgumentTypeError(f"unknown claim {exc.args[0]!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--segment-size", type=_int, default=DEFAULT_SEGMENT_SIZE,
                        help="odd candidates per sieve segment")
    common.add_argument("--threads", type=int, default=None,
                        help="sieve threads (default: $ANDRICA_LAB_THREADS or 1)")
    common.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="andrica-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check the claim ledger")
    p.add_argument("--limit", type=_int, default=DEFAULT_VERIFY_LIMIT)
    p.add_argument("--claims", type=_claims, default=None, help="comma list of claim ids")
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--checkpoint", type=Path, default=None, help="write checkpoints here")
    p.add_argument("--checkpoint-every", type=int, default=64, help="segments between checkpoints")
    p.add_argument("--resume", type=Path, default=None, help="continue from this checkpoint")
    p.add_argument("--band-lo", type=float, default=0.9)
    p.add_argument("--band-hi", type=float, default=1.2)
    p.add_argument("--band-start", type=_int, default=1000)
    p.add_argument("--h-tolerance", type=float, default=1e-12)

    p = sub.add_parser("stats", parents=[common], help="running gap and Andrica averages")
    p.add_argument("--limit", type=_int, required=True)
    p.add_argument("--stride", type=_int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("bounds", parents=[common], help="check k-th prime bounds")
    p.add_argument("--k-max", type=_int, required=True)
    p.add_argument("--square-from", type=_int, default=2,
                   help="first k for the p_k < k^2 check (1 exposes the p_1 exception)")

    p = sub.add_parser("general", parents=[common], help="generalised exponent threshold")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--limit", type=_int, default=None, help="also scan gap records up to this limit")

    p = sub.add_parser("records", parents=[common], help="record gaps and Andrica values")
    p.add_argument("--limit", type=_int, required=True)

    sub.add_parser("catalog", parents=[common], help="list claims and their expected status")
    return parser


@contextmanager
def _output(path: Path | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _dump(obj, path: Path | None) -> None:
    with _output(path) as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


def cmd_verify(args) -> int:
    config = RunConfig(limit=args.limit, segment_size=args.segment_size, parallelism=args.threads,
                       h_tolerance=args.h_tolerance, band_lo=args.band_lo, band_hi=args.band_hi,
                       band_start=args.band_start, checkpoint_path=args.checkpoint,
                       checkpoint_every=args.checkpoint_every)
    if args.resume is not None:
        state = checkpoint_resume(args.resume)
        if args.claims is not None and set(args.claims) != set(state.ledger.accumulators):
            raise ConfigError("--claims must match the claims recorded in the checkpoint")
    else:
        state = RunState.fresh(config, args.claims)
    state.advance(config.limit, config.segment_size, config.threads,
                  checkpoint_path=config.checkpoint_path, checkpoint_every=config.checkpoint_every)
    report = state.report(config.limit)
    _dump(report, args.out)
    return 1 if report["expected_true_violated"] else 0


def write_stats(block: StatsBlock, stride: int, fmt: str, fh: IO[str]) -> None:
    keep = (block.n % stride) == 0
    if not keep.any():
        return
    cols = [a[keep].tolist() for a in (block.n, block.p, block.q, block.g, block.h,
                                       block.g_bar, block.h_bar)]
    if fmt == "csv":
        fh.writelines(CSV_ROW.format(*row) for row in zip(*cols))
    else:
        keys = CSV_HEADER.split(",")
        fh.writelines(json.dumps(dict(zip(keys, row))) + "\n" for row in zip(*cols))


def cmd_stats(args) -> int:
    config = RunConfig(limit=args.limit, segment_size=args.segment_size, parallelism=args.threads,
                       stride=args.stride, output_format=args.format)
    state = RunState.fresh(config, claims=[])
    with _output(args.out) as fh:
        if config.output_format == "csv":
            fh.write(CSV_HEADER + "\n")
        state.advance(config.limit, config.segment_size, config.threads,
                      on_block=lambda b: write_stats(b, config.stride, config.output_format, fh))
    return 0


def cmd_bounds(args) -> int:
    report = check_bounds(args.k_max, square_from=args.square_from,
                          segment_size=args.segment_size, threads=args.threads)
    _dump(report.to_dict(), args.out)
    return 1 if report.violations else 0


def cmd_general(args) -> int:
    analysis = threshold_n0(args.x)
    out = analysis.to_dict()
    if args.limit is not None:
        if args.limit < 3:
            raise ConfigError(f"limit must be >= 3, got {args.limit}")
        out["check"] = check_generalized(args.x, args.limit, args.segment_size, args.threads).to_dict()
    _dump(out, args.out)
    return 0


def cmd_records(args) -> int:
    config = RunConfig(limit=args.limit, segment_size=args.segment_size, parallelism=args.threads)
    state = RunState.fresh(config, claims=[]).advance(config.limit, config.segment_size, config.threads)
    tracker = state.tracker
    out = tracker.to_dict()
    out["fraction_below_one"] = fraction_below_one(tracker)
    out["max_h"] = {"n": tracker.max_h[0], "h": tracker.max_h[1]}
    out["max_g"] = {"n": tracker.max_g[0], "g": tracker.max_g[1]}
    _dump(out, args.out)
    return 0


def cmd_catalog(args) -> int:
    _dump([{"claim": c.value, "source": src, "expected": status}
           for c, src, status in claim_catalog()], args.out)
    return 0


COMMANDS = {"verify": cmd_verify, "stats": cmd_stats, "bounds": cmd_bounds,
            "general": cmd_general, "records": cmd_records, "catalog": cmd_catalog}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"andrica-lab: error: {exc}", file=sys.stderr)
        return 2
    except (AndricaLabError, OSError) as exc:
        print(f"andrica-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
