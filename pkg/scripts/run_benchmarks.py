#!/usr/bin/env python3
"""Run the benchmark presets and print an RMSE table.

Usage: python scripts/run_benchmarks.py [--out DIR] [--presets a,b,c]
"""

import argparse
import time

from yauyau import execute, get_preset, preset_names, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=None, help="write artifact files under DIR/<preset>/")
    parser.add_argument(
        "--presets",
        default="cubic1d,cubic3d,almostlinear",
        help="comma-separated preset names (default: the three benchmarks)",
    )
    args = parser.parse_args()

    names = [n.strip() for n in args.presets.split(",") if n.strip()]
    unknown = set(names) - set(preset_names())
    if unknown:
        parser.error(f"unknown presets: {sorted(unknown)}")

    print(f"{'preset':<16}{'rmse':>10}{'zero-rmse':>12}{'ns':>6}{'ntau':>8}{'wall':>9}")
    for name in names:
        cfg = get_preset(name)
        started = time.perf_counter()
        if args.out:
            result = run_experiment(cfg, out_dir=f"{args.out}/{name}")
        else:
            result = execute(cfg)
        wall = time.perf_counter() - started
        print(
            f"{name:<16}{result.rmse:>10.4f}{result.zero_rmse:>12.4f}"
            f"{result.grid.ns:>6}{result.tg.ntau:>8}{wall:>8.1f}s"
        )


if __name__ == "__main__":
    main()
