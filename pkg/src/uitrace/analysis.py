"""Per-trace analysis: both detectors, issue checks, ranking and fixes."""

from __future__ import annotations

from dataclasses import dataclass

from .fixes import FixDirective, dedupe, rank_regions, synthesize_fix
from .issues import AppProfile, coverage_check, detect_logout, detect_unresponsive
from .params import DetectorParams
from .partition import DegenerateTrace, PartitionResult, detect_partition
from .regions import Region
from .tarpit import detect_tarpits, reportable
from .trace import Trace

REPORT_SCHEMA = "uitrace-report/1"


@dataclass(frozen=True)
class Analysis:
    trace: Trace
    partition: PartitionResult | None
    regions: list[Region]
    ranks: dict[tuple[int, int, str], int]
    region_fixes: list[FixDirective]
    fixes: list[FixDirective]
    issues: list[tuple]


def general_regions(trace: Trace, params: DetectorParams) -> tuple[PartitionResult | None, list[Region]]:
    """Accepted partition region (if any) followed by reportable tarpits."""
    try:
        part = detect_partition(trace, params)
    except DegenerateTrace:
        part = None
    regions = [part.region] if part is not None and part.accepted else []
    regions += reportable(detect_tarpits(trace, params), params.tarpit_ceiling)
    return part, regions


def analyze(trace: Trace, params: DetectorParams = DetectorParams(), profile: AppProfile | None = None,
            top_k: int = 1) -> Analysis:
    part, regions = general_regions(trace, params)
    ranked = rank_regions(regions, [trace])
    ranked_fixes = [(rr, synthesize_fix(rr, trace)) for rr in ranked]
    ranks = {(rr.region.start, rr.region.end, rr.region.kind): rr.rank for rr in ranked}
    fixes = dedupe(fix for rr, fix in ranked_fixes if rr.rank <= top_k)
    issues = []
    if profile is not None:
        findings = []
        logout = detect_logout(trace, profile, params.t_min_ms)
        if logout is not None:
            findings.append(logout)
        findings += detect_unresponsive(trace, profile, params.t_min_ms)
        issues = coverage_check(trace, findings, regions, params.coverage_union)
    ordered = [rr.region for rr in ranked]
    return Analysis(trace, part, ordered, ranks, [f for _, f in ranked_fixes], fixes, issues)


def report(an: Analysis, params: DetectorParams, top_k: int = 1) -> dict:
    trace = an.trace
    regions = []
    for reg, fix in zip(an.regions, an.region_fixes):
        item = reg.to_json()
        item["rank"] = an.ranks[(reg.start, reg.end, reg.kind)]
        item["fix"] = fix.to_json()
        regions.append(item)
    spans = [r.span_ms for r in an.regions]
    part = None
    if an.partition is not None:
        part = {
            "boundary_index": an.partition.boundary_index,
            "objective_value": an.partition.objective_value,
            "accepted": an.partition.accepted,
        }
    return {
        "schema": REPORT_SCHEMA,
        "trace_id": trace.trace_id,
        "tool": trace.tool,
        "app": trace.app,
        "entries": len(trace),
        "params": {**params.to_json(), "top_k": top_k},
        "partition": part,
        "regions": regions,
        "fixes": [f.to_json() for f in an.fixes],
        "issues": [{**f.to_json(), "covered": covered} for f, covered in an.issues],
        "summary": {
            "region_count": len(spans),
            "mean_span_ms": sum(spans) / len(spans) if spans else 0.0,
            "issue_count": len(an.issues),
            "issues_covered": sum(1 for _, c in an.issues if c),
        },
    }
