"""Paired-seed coverage with and without the top-ranked fixes.

    python3 scripts/fix_loop.py [--seeds 20] [--top-k 1] [scenario ...]
"""

from __future__ import annotations

import argparse
import statistics

from uitrace.experiments import fix_loop


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenarios", nargs="*", default=["logout", "tarpit", "tarpit_x2", "ad_freeze", "mixed"])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--top-k", type=int, default=1)
    args = ap.parse_args(argv)
    for sc in args.scenarios:
        pairs = [fix_loop(sc, s, top_k=args.top_k) for s in range(args.seeds)]
        wins = sum(after > before for before, after in pairs)
        gains = [(after - before) / before for before, after in pairs]
        print(f"{sc:<10} better on {wins}/{len(pairs)}  median gain {statistics.median(gains):+.1%}")
        for seed, (before, after) in enumerate(pairs):
            print(f"    seed {seed:2d}: {before:4d} -> {after:4d}")


if __name__ == "__main__":
    main()
