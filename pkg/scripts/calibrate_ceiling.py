"""Tarpit objective on benign walks versus injected traps.

The report ceiling must sit above every injected trap window and below the
best window of every benign walk.

    python3 scripts/calibrate_ceiling.py [--seeds 20]
"""

from __future__ import annotations

import argparse

from uitrace.experiments import benign_best_objective, run_scenario
from uitrace.params import DEFAULT_TARPIT_CEILING, DetectorParams
from uitrace.regions import covers_half, interval
from uitrace.tarpit import detect_tarpits


def trap_scores(scenario: str, seed: int) -> list[float]:
    run = run_scenario(scenario, seed)
    truths = [interval(run.trace, s, e) for kind, s, e in run.truth.regions if kind != "partition"]
    out = []
    for r in detect_tarpits(run.trace, DetectorParams()):
        span = interval(run.trace, r.start, r.end)
        if any(covers_half(t, span) for t in truths):
            out.append(r.score)
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args(argv)
    seeds = range(args.seeds)

    benign = [benign_best_objective(s) for s in seeds]
    traps = [x for sc in ("tarpit", "tarpit_x2", "ad_freeze") for s in seeds for x in trap_scores(sc, s)]
    print(f"benign best objective: min={min(benign):.5f} max={max(benign):.5f}")
    print(f"injected trap windows: n={len(traps)} min={min(traps):.5f} max={max(traps):.5f}")
    lo, hi = max(traps), min(benign)
    print(f"separating band: ({lo:.5f}, {hi:.5f})  midpoint={(lo + hi) / 2:.5f}")
    print(f"current default ceiling: {DEFAULT_TARPIT_CEILING}")


if __name__ == "__main__":
    main()
