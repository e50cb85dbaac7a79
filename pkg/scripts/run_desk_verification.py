#!/usr/bin/env python3
"""Full claim-ledger run to a limit, with periodic checkpoints and a one-line summary per claim."""
import argparse
import json
import time
from pathlib import Path

from andrica_lab.runner import RunConfig, RunState, checkpoint_resume


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=float, default=1e8)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--checkpoint", type=Path, default=None)
    ap.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    args = ap.parse_args()

    config = RunConfig(limit=int(args.limit), parallelism=args.threads, checkpoint_path=args.checkpoint)
    if args.checkpoint is not None and args.checkpoint.exists():
        state = checkpoint_resume(args.checkpoint)
        print(f"resuming after {state.records} records (p = {state.acc.last_prime})")
    else:
        state = RunState.fresh(config)

    t0 = time.perf_counter()
    state.advance(config.limit, config.segment_size, config.threads,
                  checkpoint_path=config.checkpoint_path, checkpoint_every=config.checkpoint_every)
    report = state.report(config.limit)
    elapsed = time.perf_counter() - t0

    print(f"{report['records']} gaps up to {config.limit} in {elapsed:.1f}s "
          f"({config.threads} thread{'s' if config.threads > 1 else ''})")
    for c in report["claims"]:
        fv = c["first_violation"]
        first = f"first at n={fv['n']}" if fv else "-"
        print(f"  {c['claim']:<16} checked {c['checked_n']:>10}  violations {c['violations']:>9}  {first}")
    print(f"  max h = {report['max_h']['h']:.15f} at n = {report['max_h']['n']}")
    print(f"  max g = {report['max_g']['g']} at n = {report['max_g']['n']}")
    print(f"  status: {report['status']}")
    if args.report:
        args.report.write_text(json.dumps(report, indent=2) + "\n")


if __name__ == "__main__":
    main()
