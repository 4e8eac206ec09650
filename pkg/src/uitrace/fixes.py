"""Region ranking and automatic fix directives."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .abstraction import DEFAULT_SCREEN, abstract, displayed_nodes
from .regions import Region
from .trace import ElementPath, ParseError, Trace, UiHierarchy, UiNode, resolve_path

FIX_KINDS = ("disable_element", "restart_app")
POINTER_KINDS = ("click", "long_click", "text_input")
_KIND_ORDER = {"partition": 0, "tarpit": 1}


class UnknownTrace(KeyError):
    pass


@dataclass(frozen=True)
class RankedRegion:
    region: Region
    rank: int
    group_key: tuple[str, str]


@dataclass(frozen=True)
class FixDirective:
    kind: str
    screen_fingerprint: str
    element_path: ElementPath | None = None
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in FIX_KINDS:
            raise ValueError(f"unknown fix kind {self.kind!r}")
        if (self.kind == "disable_element") != (self.element_path is not None):
            raise ValueError("element_path is required exactly for disable_element")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "screen_fingerprint": self.screen_fingerprint,
            "element_path": None if self.element_path is None else self.element_path.to_json(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, raw: dict) -> FixDirective:
        if not isinstance(raw, dict):
            raise ParseError("directive must be an object")
        try:
            path = raw.get("element_path")
            return cls(
                kind=raw["kind"],
                screen_fingerprint=str(raw["screen_fingerprint"]),
                element_path=None if path is None else ElementPath.from_json(path),
                provenance=dict(raw.get("provenance") or {}),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"bad directive {raw!r}: {exc}") from exc

    def key(self) -> tuple:
        return (self.kind, self.screen_fingerprint, self.element_path)


def rank_regions(regions: Iterable[Region], traces: Iterable[Trace]) -> list[RankedRegion]:
    """Rank regions by time span inside each (tool, app) group, longest first."""
    by_id = {t.trace_id: t for t in traces}
    grouped: dict[tuple[str, str], list[Region]] = {}
    for reg in regions:
        trace = by_id.get(reg.trace_id)
        if trace is None:
            raise UnknownTrace(reg.trace_id)
        grouped.setdefault((trace.tool, trace.app), []).append(reg)
    return rank_grouped(grouped)


def rank_grouped(grouped: dict[tuple[str, str], list[Region]]) -> list[RankedRegion]:
    out = []
    for key in sorted(grouped):
        ordered = sorted(
            grouped[key],
            key=lambda r: (-r.span_ms, r.trace_id, r.start, _KIND_ORDER[r.kind], r.end),
        )
        out.extend(RankedRegion(r, k, key) for k, r in enumerate(ordered, start=1))
    return out


def leaf_at_point(h: UiHierarchy, point: tuple[int, int], screen=DEFAULT_SCREEN) -> ElementPath | None:
    """Path of the single displayed leaf whose bounds contain ``point``."""
    x, y = point
    hits = [
        steps
        for node, steps in displayed_nodes(h, screen)
        if not node.children and node.bounds[0] <= x <= node.bounds[2] and node.bounds[1] <= y <= node.bounds[3]
    ]
    if len(hits) != 1:
        return None
    return ElementPath(hits[0])


def synthesize_fix(ranked: RankedRegion, trace: Trace) -> FixDirective:
    region = ranked.region
    provenance = {"trace_id": trace.trace_id, "start": region.start, "end": region.end, "rank": ranked.rank}
    if region.start > 1:
        before = trace.at(region.start - 1)
        action = before.action
        path = None
        if action.target_path is not None and resolve_path(before.hierarchy, action.target_path) is not None:
            path = action.target_path
        elif action.kind in POINTER_KINDS and action.point is not None:
            path = leaf_at_point(before.hierarchy, action.point)
        if path is not None:
            return FixDirective(
                "disable_element", abstract(before.hierarchy).hex, path, provenance
            )
    trigger = trace.at(region.start).hierarchy
    return FixDirective("restart_app", abstract(trigger).hex, None, provenance)


def dedupe(directives: Iterable[FixDirective]) -> list[FixDirective]:
    seen = set()
    out = []
    for d in directives:
        if d.key() not in seen:
            seen.add(d.key())
            out.append(d)
    return out


def _disable(node: UiNode, steps) -> UiNode:
    if not steps:
        return replace(node, enabled=False)
    k = steps[0][2]
    children = list(node.children)
    children[k] = _disable(children[k], steps[1:])
    return replace(node, children=tuple(children))


def apply_directive(h: UiHierarchy, directive: FixDirective, fingerprint: str | None = None) -> UiHierarchy:
    """Disable the directive's element on a matching screen; other screens pass through.

    ``fingerprint`` may be given when the caller already knows the screen's
    abstract fingerprint.
    """
    if directive.kind != "disable_element":
        return h
    if fingerprint is None:
        fingerprint = abstract(h).hex
    if fingerprint != directive.screen_fingerprint:
        return h
    if resolve_path(h, directive.element_path) is None:
        return h
    return UiHierarchy(h.activity, _disable(h.root, directive.element_path.steps))


def dump_fixes(directives: Iterable[FixDirective], path: str | Path) -> None:
    Path(path).write_text(fixes_json(directives), encoding="utf-8")


def fixes_json(directives: Iterable[FixDirective]) -> str:
    return json.dumps({"directives": [d.to_json() for d in directives]}, indent=2, sort_keys=True) + "\n"


def load_fixes(path: str | Path) -> list[FixDirective]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("directives"), list):
        raise ParseError(f"{path}: expected {{'directives': [...]}}")
    return [FixDirective.from_json(d) for d in raw["directives"]]
