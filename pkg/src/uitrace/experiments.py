"""Seeded simulator experiments shared by scripts/ and the acceptance tests."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .analysis import Analysis, analyze
from .params import DetectorParams
from .sim import GroundTruthLog, ScenarioSpec, coverage, evaluate_detection, generate, model_for, profile_for
from .sim.explorer import run_with_fixes
from .tarpit import detect_tarpits
from .trace import Trace

SEEDS = tuple(range(20))


@dataclass
class ScenarioRun:
    scenario: str
    seed: int
    trace: Trace
    truth: GroundTruthLog
    analysis: Analysis

    @property
    def injected_index(self) -> int | None:
        """Index of the first destructive action, if any was taken."""
        return self.truth.destructive[0][0] if self.truth.destructive else None


def run_scenario(scenario: str, seed: int, params: DetectorParams = DetectorParams(), top_k: int = 1) -> ScenarioRun:
    model = model_for(scenario, seed)
    trace, truth = generate(model, ScenarioSpec(scenario, seed))
    return ScenarioRun(scenario, seed, trace, truth, analyze(trace, params, profile_for(model), top_k))


def fix_loop(scenario: str, seed: int, params: DetectorParams = DetectorParams(), top_k: int = 1) -> tuple[int, int]:
    """Coverage without and with the run's own top-k fixes, same seed."""
    run = run_scenario(scenario, seed, params, top_k)
    fixed, _ = run_with_fixes(model_for(scenario, seed), ScenarioSpec(scenario, seed), run.analysis.fixes)
    return run.truth.distinct_screens, coverage(fixed)


def benign_best_objective(seed: int, params: DetectorParams = DetectorParams()) -> float:
    """Lowest tarpit objective on a benign walk, before any ceiling."""
    model = model_for("benign", seed)
    trace, _ = generate(model, ScenarioSpec("benign", seed))
    scores = [r.score for r in detect_tarpits(trace, params)]
    return min(scores) if scores else float("inf")


def detection_summary(scenario: str, seeds=SEEDS, params: DetectorParams = DetectorParams()) -> dict:
    recalls, precisions, boundary_hits, accepted_any, covered, findings = [], [], 0, 0, 0, 0
    for seed in seeds:
        run = run_scenario(scenario, seed, params)
        m = evaluate_detection(run.analysis.regions, run.truth, run.trace)
        recalls.append(m.recall)
        precisions.append(m.precision)
        accepted_any += bool(run.analysis.regions)
        part = run.analysis.partition
        k = run.injected_index
        if k is not None and part is not None and part.accepted and abs(part.boundary_index - k) <= 3:
            boundary_hits += 1
        findings += len(run.analysis.issues)
        covered += sum(1 for _, c in run.analysis.issues if c)
    return {
        "scenario": scenario,
        "seeds": len(seeds),
        "mean_recall": statistics.mean(recalls),
        "mean_precision": statistics.mean(precisions),
        "runs_with_regions": accepted_any,
        "boundary_hits": boundary_hits,
        "findings": findings,
        "findings_covered": covered,
    }
