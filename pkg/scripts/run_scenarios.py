"""Detection quality per simulator scenario over a range of seeds.

    python3 scripts/run_scenarios.py [--seeds 20] [scenario ...]
"""

from __future__ import annotations

import argparse

from uitrace.experiments import detection_summary
from uitrace.sim.explorer import SCENARIOS


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenarios", nargs="*", default=list(SCENARIOS))
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args(argv)
    print(f"{'scenario':<10} {'recall':>7} {'prec':>6} {'w/ regions':>10} {'boundary':>8} {'covered':>8}")
    for sc in args.scenarios:
        s = detection_summary(sc, range(args.seeds))
        print(
            f"{sc:<10} {s['mean_recall']:7.3f} {s['mean_precision']:6.3f} {s['runs_with_regions']:>10} "
            f"{s['boundary_hits']:>8} {s['findings_covered']:>4}/{s['findings']:<3}"
        )


if __name__ == "__main__":
    main()
