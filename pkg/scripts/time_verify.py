#!/usr/bin/env python3
"""Time each verification group and save the results as JSON."""

import argparse
import json
import sys
import time
from datetime import datetime
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "apps" / "toolkit"))

from geospin.verification import GROUPS, run_verify  # noqa: E402


class VerifyTimer:
    def __init__(self, seed: int):
        self.seed = seed
        self.timings = {}
        self.results = {}

    def timer(self, name: str):
        """Context manager for timing one group."""

        class Timer:
            def __init__(self, test, name):
                self.test = test
                self.name = name
                self.start = None

            def __enter__(self):
                self.start = time.perf_counter()
                return self

            def __exit__(self, *args):
                elapsed = time.perf_counter() - self.start
                self.test.timings[self.name] = elapsed
                print(f"  {self.name}: {elapsed:.2f}s")

        return Timer(self, name)

    def run_group(self, group: str) -> None:
        with self.timer(group):
            report = run_verify(self.seed, [group])
        failed = [c.name for c in report.checks if not c.passed]
        self.results[group] = {"checks": len(report.checks), "failed": failed}


def main():
    parser = argparse.ArgumentParser(description="Time the geospin verification groups")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--only", action="append", default=[], choices=GROUPS)
    parser.add_argument("--output-dir", type=Path, default=Path("verify_timings"))
    args = parser.parse_args()

    groups = [g for g in GROUPS if not args.only or g in args.only]
    print(f"Timing {len(groups)} verification groups (seed {args.seed})")

    timer = VerifyTimer(args.seed)
    for group in groups:
        timer.run_group(group)

    total = sum(timer.timings.values())
    print(f"\n{'=' * 60}")
    print(f"Total: {total:.2f}s")
    slowest = max(timer.timings, key=timer.timings.get)
    print(f"Slowest: {slowest} ({timer.timings[slowest]:.2f}s)")
    failures = {g: r["failed"] for g, r in timer.results.items() if r["failed"]}
    if failures:
        print(f"Failed checks: {failures}")

    args.output_dir.mkdir(parents=True, exist_ok=True)
    results_file = args.output_dir / f"verify_timings_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    with open(results_file, "w") as f:
        json.dump({"seed": args.seed, "timings": timer.timings, "results": timer.results, "total": total}, f, indent=2)
    print(f"\nResults saved to: {results_file}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
