"""Trace data model, JSON ingestion and emission.

A trace is the sequence of screens observed while a testing tool drives an
app, each screen paired with the action the tool performed on it.  Storage is
0-based (``trace.entries[0]``); every detector and report speaks 1-based
indices, so use :meth:`Trace.at` when translating.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

ACTION_KINDS = ("click", "long_click", "text_input", "back", "restart", "none")
PATHLESS_KINDS = frozenset({"back", "restart", "none"})


class ParseError(ValueError):
    """Input is not valid JSON or does not follow the trace schema."""


class InvariantError(ValueError):
    """Input parsed but violates a trace invariant."""


Bounds = tuple[int, int, int, int]


@dataclass(frozen=True, slots=True)
class UiNode:
    element_type: str
    element_id: str | None = None
    visible: bool = True
    bounds: Bounds = (0, 0, 0, 0)
    text: str | None = None
    children: tuple[UiNode, ...] = ()
    enabled: bool = True

    def walk(self) -> Iterator[UiNode]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def size(self) -> int:
        return sum(1 for _ in self.walk())


@dataclass(frozen=True, slots=True)
class UiHierarchy:
    activity: str
    root: UiNode


PathStep = tuple[str, "str | None", int]


@dataclass(frozen=True, slots=True)
class ElementPath:
    """Route from the root to one element: (type, id, child ordinal) per level."""

    steps: tuple[PathStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> list:
        return [[t, i, o] for t, i, o in self.steps]

    @classmethod
    def from_json(cls, raw: Any) -> ElementPath:
        if not isinstance(raw, list):
            raise ParseError(f"target_path must be a list, got {type(raw).__name__}")
        steps = []
        for step in raw:
            if not (isinstance(step, list) and len(step) == 3):
                raise ParseError(f"path step must be [type, id, ordinal]: {step!r}")
            etype, eid, ordinal = step
            if not isinstance(etype, str) or not (eid is None or isinstance(eid, str)):
                raise ParseError(f"bad path step {step!r}")
            if not isinstance(ordinal, int) or isinstance(ordinal, bool) or ordinal < 0:
                raise ParseError(f"path ordinal must be a non-negative int: {step!r}")
            steps.append((etype, eid, ordinal))
        return cls(tuple(steps))


@dataclass(frozen=True, slots=True)
class Action:
    kind: str = "none"
    target_path: ElementPath | None = None
    point: tuple[int, int] | None = None
    text: str | None = None

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise InvariantError(f"unknown action kind {self.kind!r}")
        if self.kind in PATHLESS_KINDS and self.target_path is not None:
            raise InvariantError(f"{self.kind} action cannot carry a target_path")


@dataclass(frozen=True, slots=True)
class TraceEntry:
    timestamp_ms: int
    hierarchy: UiHierarchy
    action: Action = field(default_factory=Action)

    @property
    def activity(self) -> str:
        return self.hierarchy.activity


@dataclass(frozen=True)
class Trace:
    tool: str
    app: str
    trace_id: str
    entries: tuple[TraceEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def at(self, i: int) -> TraceEntry:
        """Entry at 1-based index ``i``."""
        if not 1 <= i <= len(self.entries):
            raise IndexError(f"index {i} outside 1..{len(self.entries)}")
        return self.entries[i - 1]

    @property
    def timestamps(self) -> list[int]:
        return [e.timestamp_ms for e in self.entries]

    def time(self, i: int) -> int:
        return self.entries[i - 1].timestamp_ms

    def validate(self) -> None:
        check_invariants(self)


def resolve_path(h: UiHierarchy, p: ElementPath) -> UiNode | None:
    node = h.root
    for etype, eid, ordinal in p.steps:
        if ordinal >= len(node.children):
            return None
        child = node.children[ordinal]
        if child.element_type != etype or child.element_id != eid:
            return None
        node = child
    return node


def path_to(root: UiNode, target: UiNode) -> ElementPath | None:
    """Path from ``root`` to the node object ``target`` (identity match)."""
    stack: list[tuple[UiNode, tuple[PathStep, ...]]] = [(root, ())]
    while stack:
        node, steps = stack.pop()
        if node is target:
            return ElementPath(steps)
        for k, child in enumerate(node.children):
            stack.append((child, steps + ((child.element_type, child.element_id, k),)))
    return None


def check_invariants(trace: Trace) -> None:
    if not trace.entries:
        raise InvariantError("a trace needs at least one entry")
    last = len(trace.entries) - 1
    prev_ts = None
    for k, entry in enumerate(trace.entries):
        i = k + 1
        if prev_ts is not None and entry.timestamp_ms < prev_ts:
            raise InvariantError(
                f"entry {i}: timestamp {entry.timestamp_ms} < previous {prev_ts}"
            )
        prev_ts = entry.timestamp_ms
        if entry.action.kind == "none" and k != last:
            raise InvariantError(f"entry {i}: 'none' action before the final entry")
        if entry.action.target_path is not None:
            if resolve_path(entry.hierarchy, entry.action.target_path) is None:
                raise InvariantError(f"entry {i}: target_path does not resolve")
        for node in entry.hierarchy.root.walk():
            left, top, right, bottom = node.bounds
            if left > right or top > bottom:
                raise InvariantError(f"entry {i}: malformed bounds {node.bounds}")


# ---------------------------------------------------------------- JSON codec


def _expect(obj: dict, key: str, types, where: str, nullable: bool = False):
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    value = obj[key]
    if value is None and nullable:
        return None
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ParseError(f"{where}: {key!r} has wrong type bool")
    if not isinstance(value, types):
        raise ParseError(f"{where}: {key!r} has wrong type {type(value).__name__}")
    return value


def node_from_json(raw: Any, where: str = "node") -> UiNode:
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected object")
    bounds = _expect(raw, "bounds", list, where)
    if len(bounds) != 4 or not all(isinstance(b, int) and not isinstance(b, bool) for b in bounds):
        raise ParseError(f"{where}: bounds must be four integers")
    children = _expect(raw, "children", list, where)
    enabled = raw.get("enabled", True)
    if not isinstance(enabled, bool):
        raise ParseError(f"{where}: 'enabled' must be a bool")
    return UiNode(
        element_type=_expect(raw, "type", str, where),
        element_id=_expect(raw, "id", str, where, nullable=True),
        visible=_expect(raw, "visible", bool, where),
        bounds=tuple(bounds),
        text=_expect(raw, "text", str, where, nullable=True),
        children=tuple(node_from_json(c, f"{where}.children[{k}]") for k, c in enumerate(children)),
        enabled=enabled,
    )


def node_to_json(node: UiNode) -> dict:
    out = {
        "type": node.element_type,
        "id": node.element_id,
        "visible": node.visible,
        "bounds": list(node.bounds),
        "text": node.text,
        "children": [node_to_json(c) for c in node.children],
    }
    if not node.enabled:
        out["enabled"] = False
    return out


def _action_from_json(raw: Any, where: str) -> Action:
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: action must be an object")
    kind = _expect(raw, "kind", str, where)
    if kind not in ACTION_KINDS:
        raise ParseError(f"{where}: unknown action kind {kind!r}")
    path_raw = raw.get("target_path")
    point_raw = raw.get("point")
    point = None
    if point_raw is not None:
        if not (isinstance(point_raw, list) and len(point_raw) == 2 and all(isinstance(v, int) for v in point_raw)):
            raise ParseError(f"{where}: point must be [x, y]")
        point = (point_raw[0], point_raw[1])
    text = raw.get("text")
    if text is not None and not isinstance(text, str):
        raise ParseError(f"{where}: text must be a string or null")
    path = None if path_raw is None else ElementPath.from_json(path_raw)
    if kind in PATHLESS_KINDS and path is not None:
        raise InvariantError(f"{where}: {kind} action cannot carry a target_path")
    return Action(kind=kind, target_path=path, point=point, text=text)


def trace_from_dict(raw: Any) -> Trace:
    if not isinstance(raw, dict):
        raise ParseError("trace root must be an object")
    entries_raw = _expect(raw, "entries", list, "trace")
    entries = []
    for k, e in enumerate(entries_raw):
        where = f"entries[{k}]"
        if not isinstance(e, dict):
            raise ParseError(f"{where}: expected object")
        hierarchy = UiHierarchy(
            activity=_expect(e, "activity", str, where),
            root=node_from_json(_expect(e, "hierarchy", dict, where), f"{where}.hierarchy"),
        )
        entries.append(
            TraceEntry(
                timestamp_ms=_expect(e, "timestamp_ms", int, where),
                hierarchy=hierarchy,
                action=_action_from_json(_expect(e, "action", dict, where), f"{where}.action"),
            )
        )
    trace = Trace(
        tool=_expect(raw, "tool", str, "trace"),
        app=_expect(raw, "app", str, "trace"),
        trace_id=_expect(raw, "trace_id", str, "trace"),
        entries=tuple(entries),
    )
    check_invariants(trace)
    return trace


def trace_to_dict(trace: Trace) -> dict:
    node_cache: dict[int, dict] = {}

    def node_json(node: UiNode) -> dict:
        # simulator traces share hierarchy objects between entries
        key = id(node)
        if key not in node_cache:
            node_cache[key] = node_to_json(node)
        return node_cache[key]

    entries = []
    for e in trace.entries:
        a = e.action
        entries.append(
            {
                "timestamp_ms": e.timestamp_ms,
                "activity": e.hierarchy.activity,
                "hierarchy": node_json(e.hierarchy.root),
                "action": {
                    "kind": a.kind,
                    "target_path": None if a.target_path is None else a.target_path.to_json(),
                    "point": None if a.point is None else list(a.point),
                    "text": a.text,
                },
            }
        )
    return {"tool": trace.tool, "app": trace.app, "trace_id": trace.trace_id, "entries": entries}


def dumps_trace(trace: Trace) -> str:
    return json.dumps(trace_to_dict(trace), separators=(",", ":"), ensure_ascii=False)


def loads_trace(text: str) -> Trace:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return trace_from_dict(raw)


def load_trace(path: str | Path) -> Trace:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8") from exc
    return loads_trace(text)


def dump_trace(trace: Trace, path: str | Path) -> None:
    Path(path).write_text(dumps_trace(trace), encoding="utf-8")
