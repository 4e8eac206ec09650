"""Issue-specific detectors (app logout, unresponsive ad screens) and the
half-overlap rule deciding whether a general region already covers them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .regions import Region, covers_half, interval, union_overlap_ms
from .trace import ParseError, Trace

ISSUE_KINDS = ("app_logout", "unresponsive_ui")

# activity id the ad SDK uses in every app
DEFAULT_AD_ACTIVITY = "com.google.android.gms.ads.AdActivity"


@dataclass(frozen=True)
class IssueFinding:
    kind: str
    start: int
    end: int
    span_ms: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "start": self.start, "end": self.end, "span_ms": self.span_ms}


@dataclass(frozen=True)
class AppProfile:
    app: str
    login_activities: frozenset[str] = field(default_factory=frozenset)
    ad_activity_id: str = DEFAULT_AD_ACTIVITY

    def to_json(self) -> dict:
        return {
            "app": self.app,
            "login_activities": sorted(self.login_activities),
            "ad_activity_id": self.ad_activity_id,
        }


def load_profile(path: str | Path) -> AppProfile:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("app"), str):
        raise ParseError(f"{path}: profile needs an 'app' string")
    logins = raw.get("login_activities", [])
    if not isinstance(logins, list) or not all(isinstance(a, str) for a in logins):
        raise ParseError(f"{path}: login_activities must be a list of strings")
    ad = raw.get("ad_activity_id", DEFAULT_AD_ACTIVITY)
    if not isinstance(ad, str):
        raise ParseError(f"{path}: ad_activity_id must be a string")
    return AppProfile(raw["app"], frozenset(logins), ad)


def detect_logout(trace: Trace, profile: AppProfile, t_min_ms: int) -> IssueFinding | None:
    hits = [i for i, e in enumerate(trace.entries, start=1) if e.activity in profile.login_activities]
    if not hits:
        return None
    f, g = hits[0], hits[-1]
    span = trace.time(g) - trace.time(f)
    if span < t_min_ms:
        return None
    return IssueFinding("app_logout", f, g, span)


def detect_unresponsive(trace: Trace, profile: AppProfile, t_min_ms: int) -> list[IssueFinding]:
    findings = []
    run_start = None
    n = len(trace)
    for i, e in enumerate(trace.entries, start=1):
        on_ad = e.activity == profile.ad_activity_id
        if on_ad and run_start is None:
            run_start = i
        if run_start is not None and (not on_ad or i == n):
            end = i if on_ad else i - 1
            span = trace.time(end) - trace.time(run_start)
            if span >= t_min_ms:
                findings.append(IssueFinding("unresponsive_ui", run_start, end, span))
            run_start = None
    return findings


def coverage_check(
    trace: Trace,
    findings: list[IssueFinding],
    regions: list[Region],
    union: bool = False,
) -> list[tuple[IssueFinding, bool]]:
    """A finding is covered when one region overlaps at least half its time span.

    ``union=True`` pools the overlap of all regions instead.
    """
    spans = [interval(trace, r.start, r.end) for r in regions]
    out = []
    for f in findings:
        target = interval(trace, f.start, f.end)
        if union:
            ov = union_overlap_ms(target, spans)
            covered = ov is not None and 2 * ov >= target[1] - target[0]
        else:
            covered = any(covers_half(target, s) for s in spans)
        out.append((f, covered))
    return out
