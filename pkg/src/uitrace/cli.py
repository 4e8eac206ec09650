"""uitrace command line: analyze, rank, emit-fixes, simulate, make-model."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import REPORT_SCHEMA, analyze, report
from .fixes import FixDirective, dedupe, dump_fixes, fixes_json, load_fixes, rank_grouped
from .issues import load_profile
from .params import DEFAULT_D_MAX, DEFAULT_T_MIN_MS, DEFAULT_TARPIT_CEILING, DetectorParams
from .regions import Region
from .trace import InvariantError, ParseError, dump_trace, load_trace

EXIT_OK, EXIT_INPUT = 0, 2


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _params(args) -> DetectorParams:
    return DetectorParams(
        t_min_ms=args.t_min_ms,
        d_max=args.d_max,
        tarpit_ceiling=args.tarpit_ceiling,
        tarpit_unconstrained=args.tarpit_unconstrained,
        coverage_union=args.coverage_union,
    )


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-min-ms", type=int, default=DEFAULT_T_MIN_MS)
    p.add_argument("--d-max", type=int, default=DEFAULT_D_MAX)
    p.add_argument("--tarpit-ceiling", type=float, default=DEFAULT_TARPIT_CEILING,
                   help="drop tarpit windows scoring above this")
    p.add_argument("--tarpit-unconstrained", action="store_true",
                   help="search windows of any span, gate on t_min afterwards")
    p.add_argument("--coverage-union", action="store_true",
                   help="issue coverage may pool several regions")
    p.add_argument("--top-k", type=int, default=1, help="fixes from the k best-ranked regions")


def cmd_analyze(args) -> int:
    params = _params(args)
    profile = load_profile(args.profile) if args.profile else None
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traces = [load_trace(p) for p in args.traces]
    for trace in traces:
        an = analyze(trace, params, profile, args.top_k)
        rep = report(an, params, args.top_k)
        dest = out_dir / f"{trace.trace_id}.report.json"
        _write_json(rep, dest)
        for reg in rep["regions"]:
            print(
                f"REGION {trace.trace_id} rank={reg['rank']} kind={reg['kind']} "
                f"[{reg['start']},{reg['end']}] span_ms={reg['span_ms']} score={reg['score']:.6g}"
            )
        for fix in rep["fixes"]:
            target = "-" if fix["element_path"] is None else json.dumps(fix["element_path"])
            print(f"FIX {trace.trace_id} {fix['kind']} screen={fix['screen_fingerprint']} path={target}")
        for issue in rep["issues"]:
            print(
                f"ISSUE {trace.trace_id} {issue['kind']} [{issue['start']},{issue['end']}] "
                f"span_ms={issue['span_ms']} covered={str(issue['covered']).lower()}"
            )
        print(f"REPORT {dest}")
    return EXIT_OK


def _load_report(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("schema") != REPORT_SCHEMA:
        raise ParseError(f"{path}: not a {REPORT_SCHEMA} report")
    try:
        for reg in raw["regions"]:
            Region.from_json(reg)
            FixDirective.from_json(reg["fix"])
        str(raw["tool"]), str(raw["app"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed report: {exc!r}") from exc
    return raw


def _pooled(paths):
    """Regions grouped by (tool, app), plus the fix recorded for each."""
    grouped: dict[tuple[str, str], list[Region]] = {}
    fix_of: dict[tuple, FixDirective] = {}
    for path in paths:
        rep = _load_report(path)
        key = (rep["tool"], rep["app"])
        for raw in rep["regions"]:
            reg = Region.from_json(raw)
            grouped.setdefault(key, []).append(reg)
            fix_of[(reg.trace_id, reg.start, reg.end, reg.kind)] = FixDirective.from_json(raw["fix"])
    return rank_grouped(grouped), fix_of


def cmd_rank(args) -> int:
    ranked, _ = _pooled(args.reports)
    for rr in ranked:
        r = rr.region
        tool, app = rr.group_key
        print(f"RANK {tool} {app} {rr.rank} {r.trace_id} {r.kind} [{r.start},{r.end}] span_ms={r.span_ms}")
    return EXIT_OK


def cmd_emit_fixes(args) -> int:
    ranked, fix_of = _pooled(args.reports)
    picked = []
    for rr in ranked:
        if rr.rank <= args.top_k:
            r = rr.region
            fix = fix_of[(r.trace_id, r.start, r.end, r.kind)]
            picked.append(FixDirective(fix.kind, fix.screen_fingerprint, fix.element_path,
                                       {**fix.provenance, "rank": rr.rank}))
    picked = dedupe(picked)
    if args.out:
        dump_fixes(picked, args.out)
    else:
        sys.stdout.write(fixes_json(picked))
    print(f"FIXES {len(picked)}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .sim import coverage, evaluate_detection, generate, load_model, load_scenario, profile_for, unmatched_directives
    from .sim.explorer import run_with_fixes

    model = load_model(args.model)
    spec = load_scenario(args.scenario)
    fixes = load_fixes(args.fixes) if args.fixes else []
    unmatched = unmatched_directives(model, fixes)
    if unmatched:
        print(f"warning: {len(unmatched)} of {len(fixes)} fix directives match no screen of "
              f"model {model.app!r}", file=sys.stderr)
    if fixes:
        trace, truth = run_with_fixes(model, spec, fixes)
        before, after = generate(model, spec)[1].distinct_screens, coverage(trace)
        print(f"COVERAGE {after} baseline={before} delta={after - before}")
    else:
        trace, truth = generate(model, spec)
        print(f"COVERAGE {truth.distinct_screens}")
    dump_trace(trace, args.out)
    if args.truth_out:
        _write_json(truth.to_json(), Path(args.truth_out))
    an = analyze(trace, _params(args), profile_for(model), args.top_k)
    m = evaluate_detection(an.regions, truth, trace)
    print(
        f"METRICS precision={m.precision:.4f} recall={m.recall:.4f} mean_overlap={m.mean_overlap:.4f} "
        f"true={m.true_regions} reported={m.reported_regions}"
    )
    print(f"TRACE {args.out} entries={len(trace)}")
    return EXIT_OK


def cmd_make_model(args) -> int:
    from .sim import ScenarioSpec, dump_model, model_for, profile_for

    model = model_for(args.scenario, args.seed)
    dump_model(model, args.out)
    if args.scenario_out:
        spec = ScenarioSpec(args.scenario, args.seed, args.duration_ms, args.action_period_ms)
        _write_json(spec.to_json(), Path(args.scenario_out))
    if args.profile_out:
        _write_json(profile_for(model).to_json(), Path(args.profile_out))
    print(f"MODEL {args.out} screens={len(model.screens)} edges={len(model.edges)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uitrace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="detect regions, rank them, synthesize fixes")
    p.add_argument("traces", nargs="+")
    p.add_argument("--profile", help="app profile JSON for the issue detectors")
    p.add_argument("--out-dir", default=".")
    _add_detector_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("rank", help="pool report regions per tool/app and rank them")
    p.add_argument("reports", nargs="+")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("emit-fixes", help="fix config from the top-ranked regions")
    p.add_argument("reports", nargs="+")
    p.add_argument("--top-k", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_emit_fixes)

    p = sub.add_parser("simulate", help="run the explorer on a model, optionally with fixes")
    p.add_argument("--model", required=True)
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--fixes")
    p.add_argument("--out", required=True, help="trace JSON to write")
    p.add_argument("--truth-out")
    _add_detector_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("make-model", help="write a stock simulator model")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--scenario-out")
    p.add_argument("--profile-out")
    p.add_argument("--duration-ms", type=int, default=3_600_000)
    p.add_argument("--action-period-ms", type=int, default=1000)
    p.set_defaults(func=cmd_make_model)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .sim.model import ModelError

    try:
        return args.func(args)
    except (ParseError, InvariantError, ModelError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
