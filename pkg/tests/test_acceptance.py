"""Acceptance criteria 1-8, one test each, every test printing one verdict line."""

import random
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from uitrace.abstraction import abstract
from uitrace.params import DetectorParams
from uitrace.partition import compute_ep, objective_profile
from uitrace.similarity import lcs_length, merge, sim_check, token_sequence
from uitrace.sim import ScenarioSpec, coverage, evaluate_detection, generate, model_for
from uitrace.sim.explorer import run_with_fixes
from uitrace.tarpit import best_window, detect_tarpits, entry_groups, merge_trace, previous_occurrence

from conftest import cached_run, cli_pipeline, record_criterion
from test_similarity import BASE, _random_pair, ah, dp_lcs, oracle_merge, oracle_sim, with_leaves

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
from perf_tarpit import synthetic_trace  # noqa: E402

SEEDS = range(20)
MIN = 60_000


def naive_profile(fps, ep):
    n_total = len(fps)
    tail = len(set(fps[ep:]))
    out = []
    for n in range(1, ep):
        prefix, suffix = set(fps[:n]), set(fps[n:])
        out.append(len(prefix & suffix) / (n_total - n) + 2 / (1 + np.exp(-(len(suffix) / tail - 1))) - 1)
    return out


def test_criterion_1_partition_oracle():
    cases = [(name, seed) for name in ("benign", "logout", "tarpit", "ad_freeze", "mixed") for seed in (0, 1)]
    worst_err, worst_time = 0.0, 0.0
    for name, seed in cases:
        trace, _ = generate(model_for(name, seed), ScenarioSpec(name, seed, duration_ms=45 * MIN))
        assert len(trace) <= 3000
        ep = compute_ep(trace, 10 * MIN)
        t0 = time.perf_counter()
        fast = objective_profile(trace, ep)
        worst_time = max(worst_time, time.perf_counter() - t0)
        fps = [abstract(e.hierarchy).fingerprint for e in trace.entries]
        slow = naive_profile(fps, ep)
        worst_err = max(worst_err, max(abs(a - b) for a, b in zip(fast, slow)))
    ok = worst_err <= 1e-9 and worst_time < 5.0
    record_criterion(1, ok, f"traces={len(cases)} max_abs_err={worst_err:.2e} max_time={worst_time:.3f}s")
    assert ok


def brute_best(roots, ts, t_min):
    best = None
    for l in range(len(roots)):
        seen = set()
        for r in range(l, len(roots)):
            seen.add(roots[r])
            if ts[r] - ts[l] < t_min:
                continue
            c, k = len(seen), r - l + 1
            # compare c/k exactly by cross-multiplying; ties: longer, then earlier
            if best is None or c * best[1] < best[0] * k or (c * best[1] == best[0] * k and r - l > best[3] - best[2]):
                best = (c, k, l, r)
    return best[0] / best[1], best[2], best[3]


def test_criterion_2_tarpit_oracle():
    details, ok = [], True
    for name, seed in (("tarpit", 0), ("benign", 1), ("logout", 2)):
        trace, _ = generate(model_for(name, seed), ScenarioSpec(name, seed, duration_ms=1999_000))
        assert len(trace) == 2000
        groups = merge_trace(trace)
        ts = np.asarray(trace.timestamps)
        t_min = 10 * MIN
        t0 = time.perf_counter()
        prev = previous_occurrence(entry_groups(trace, groups))
        fast = best_window(prev, ts, 0, len(trace) - 1, t_min)
        t_fast = time.perf_counter() - t0
        roots = [groups.assignment[abstract(e.hierarchy).fingerprint] for e in trace.entries]
        t0 = time.perf_counter()
        slow = brute_best(roots, ts.tolist(), t_min)
        t_slow = time.perf_counter() - t0
        ok &= fast == slow and t_fast < 2.0 and t_slow < 60.0
        details.append(f"{name}:{fast[0]:.5f}@[{fast[1]},{fast[2]}] fast={t_fast:.2f}s brute={t_slow:.1f}s")
    record_criterion(2, ok, " ".join(details))
    assert ok


def test_criterion_3_algorithm_fidelity():
    rng = random.Random(2024)
    mismatches = 0
    for _ in range(1000):
        ra, rb = _random_pair(rng)
        h1, h2 = ah(ra), ah(rb)
        assert h1.size <= 40 and h2.size <= 40
        mismatches += lcs_length(h1, h2) != dp_lcs(token_sequence(h1), token_sequence(h2))
        mismatches += sim_check(h1, h2, 3) != oracle_sim(h1, h2, 3)
    a, b, c = BASE, with_leaves(BASE, 2), with_leaves(BASE, 4)
    chain_ok = sim_check(a, b) and sim_check(b, c) and not sim_check(a, c)
    got = merge([c, b, a]).assignment
    replay_ok = got == oracle_merge([a, b, c], 3) == {a.fingerprint: a.fingerprint, b.fingerprint: a.fingerprint,
                                                      c.fingerprint: c.fingerprint}
    variants = [with_leaves(BASE, k) for k in range(4)] + [with_leaves(BASE, 2, "alt"), with_leaves(c, 1, "z")]
    replay_ok &= merge(variants).assignment == oracle_merge(variants, 3)
    ok = mismatches == 0 and chain_ok and replay_ok
    record_criterion(3, ok, f"pairs=1000 mismatches={mismatches} chain={chain_ok} replay={replay_ok}")
    assert ok


def test_criterion_4_detection_quality():
    hits = 0
    for seed in SEEDS:
        run = cached_run("logout", seed)
        part = run.analysis.partition
        hits += bool(part and part.accepted and abs(part.boundary_index - run.injected_index) <= 3)
    logout_recall = hits / len(SEEDS)
    recalls = []
    for seed in SEEDS:
        run = cached_run("tarpit_x2", seed)
        recalls.append(evaluate_detection(run.analysis.regions, run.truth, run.trace).recall)
    x2_recall = statistics.mean(recalls)
    clean = sum(1 for seed in SEEDS if not cached_run("benign", seed).analysis.regions)
    ok = logout_recall >= 0.95 and x2_recall >= 0.9 and clean >= 18
    record_criterion(4, ok, f"logout_recall={logout_recall:.2f} tarpit_x2_recall={x2_recall:.3f} "
                            f"benign_clean={clean}/20")
    assert ok


def test_criterion_5_issue_coverage():
    findings = covered = 0
    missing_runs = []
    for scenario in ("logout", "ad_freeze"):
        for seed in SEEDS:
            run = cached_run(scenario, seed)
            if not run.analysis.issues:
                missing_runs.append(f"{scenario}:{seed}")
            findings += len(run.analysis.issues)
            covered += sum(1 for _, c in run.analysis.issues if c)
    ok = findings == covered and not missing_runs
    record_criterion(5, ok, f"findings={findings} covered={covered} runs_without_finding={len(missing_runs)}")
    assert ok


def _paired(scenario, seed):
    run = cached_run(scenario, seed)
    fixed, _ = run_with_fixes(model_for(scenario, seed), ScenarioSpec(scenario, seed), run.analysis.fixes)
    return run.truth.distinct_screens, coverage(fixed)


def test_criterion_6_fix_loop():
    parts, ok = [], True
    for scenario in ("logout", "tarpit"):
        pairs = [_paired(scenario, seed) for seed in SEEDS]
        wins = sum(1 for base, fixed in pairs if fixed > base)
        gain = statistics.median((fixed - base) / base for base, fixed in pairs)
        ok &= wins >= 18
        if scenario == "logout":
            ok &= gain >= 0.20
        parts.append(f"{scenario}: wins={wins}/20 median_gain={gain:+.1%}")
    record_criterion(6, ok, "; ".join(parts))
    assert ok


def test_criterion_7_performance():
    trace = synthetic_trace(2000, 20000, 0)
    t0 = time.perf_counter()
    groups = merge_trace(trace)
    regions = detect_tarpits(trace, DetectorParams(), groups)
    elapsed = time.perf_counter() - t0
    distinct = len({abstract(e.hierarchy).fingerprint for e in trace.entries})
    trap = [r for r in regions if r.score <= DetectorParams().tarpit_ceiling]
    ok = elapsed <= 300 and distinct == 2000 and len(trace) == 20000 and bool(trap)
    record_criterion(7, ok, f"entries={len(trace)} distinct={distinct} elapsed={elapsed:.1f}s budget=300s")
    assert ok


def test_criterion_8_cli_determinism(tmp_path):
    runs = []
    for k in range(2):
        w = tmp_path / f"run{k}"
        w.mkdir()
        out = cli_pipeline(w, "mixed", 5, top_k=3)
        assert all(code == 0 for code, _, _ in out.values()), out
        runs.append({p.relative_to(w).as_posix(): p.read_bytes() for p in sorted(w.rglob("*.json"))})
    same = runs[0] == runs[1]
    ok = same and len(runs[0]) >= 9
    record_criterion(8, ok, f"json_files={len(runs[0])} identical={same} commands=make-model,simulate,analyze,"
                            f"rank,emit-fixes,simulate--fixes")
    assert ok
