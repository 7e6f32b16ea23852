#!/usr/bin/env python3
"""Long-run fuzzing: the test-suite fuzzer, scaled up.

The pytest run does 10^4 rounds on a fixed seed; this driver does as
many as you have patience for, on fresh seeds, and reports throughput.
Any failure prints the offending input and the seed to replay it.

    python3 scripts/fuzz_soak.py --rounds 1000000
    python3 scripts/fuzz_soak.py --seed 1234 --rounds 10000   # replay
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))
sys.path.insert(0, str(REPO / "tests"))

from test_fuzz import run_fuzz  # noqa: E402


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rounds", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=None,
                    help="fixed seed (default: a fresh one per batch)")
    ap.add_argument("--batch", type=int, default=10_000,
                    help="rounds per reported batch")
    args = ap.parse_args(argv)

    done = 0
    started = time.perf_counter()
    while done < args.rounds:
        rounds = min(args.batch, args.rounds - done)
        seed = args.seed if args.seed is not None else random.randrange(2**32)
        try:
            parsed, rejected = run_fuzz(rounds, seed)
        except AssertionError as err:
            print(f"FAILURE with --seed {seed}: {err}", file=sys.stderr)
            return 1
        done += rounds
        rate = done / (time.perf_counter() - started)
        print(f"{done}/{args.rounds} rounds  seed={seed}  "
              f"parsed={parsed} rejected={rejected}  {rate:,.0f}/s")
    print("clean")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
