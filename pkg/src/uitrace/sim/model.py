"""Synthetic app models: screens, clickable edges, traps, cosmetic variants."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..trace import ElementPath, ParseError, UiHierarchy, UiNode, node_from_json, node_to_json, resolve_path

SCREEN_W, SCREEN_H = 1080, 1920
# cosmetic leaves must stay within the default similarity distance
MAX_VARIANT_LEAVES = 3


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    target: str
    kind: str = "click"
    tag: str | None = None  # "logout", "trap_entry", "ad", ... ground-truth label
    sets_start: str | None = None  # restart lands here afterwards


@dataclass(frozen=True)
class ScreenTemplate:
    activity: str
    root: UiNode
    variant_leaves: tuple[UiNode, ...] = ()
    # weight of showing the first k variant leaves, k = 0..len(variant_leaves)
    variant_weights: tuple[float, ...] = (1.0,)


@dataclass(frozen=True)
class Trap:
    name: str
    screens: frozenset[str]
    min_dwell_ms: int
    p_escape: float = 0.01
    max_entries: int | None = None
    escape: str = "edge"  # or "restart"
    kind: str = "tarpit"  # ground-truth label


@dataclass
class AppModel:
    app: str
    start_screen: str
    screens: dict[str, ScreenTemplate]
    edges: dict[tuple[str, ElementPath], Transition]
    back: dict[str, str] = field(default_factory=dict)
    traps: list[Trap] = field(default_factory=list)
    back_weight: float = 0.1
    widget_oblivious: bool = False

    def out_edges(self, screen: str) -> list[tuple[ElementPath, Transition]]:
        return self._index().get(screen, [])

    def _index(self):
        cached = self.__dict__.get("_edge_index")
        if cached is None:
            cached = {}
            for (src, path), tr in self.edges.items():
                cached.setdefault(src, []).append((path, tr))
            for lst in cached.values():
                lst.sort(key=lambda item: item[0].steps)
            self.__dict__["_edge_index"] = cached
        return cached

    def trap_of(self, screen: str) -> Trap | None:
        for trap in self.traps:
            if screen in trap.screens:
                return trap
        return None

    def validate(self) -> None:
        if self.start_screen not in self.screens:
            raise ModelError(f"start screen {self.start_screen!r} undefined")
        for (src, path), tr in self.edges.items():
            if src not in self.screens:
                raise ModelError(f"edge from undefined screen {src!r}")
            if tr.target not in self.screens:
                raise ModelError(f"dangling edge {src!r} -> {tr.target!r}")
            if tr.sets_start is not None and tr.sets_start not in self.screens:
                raise ModelError(f"edge sets undefined start {tr.sets_start!r}")
            tpl = self.screens[src]
            if resolve_path(UiHierarchy(tpl.activity, tpl.root), path) is None:
                raise ModelError(f"edge path {path.to_json()} does not resolve on {src!r}")
        for src, dst in self.back.items():
            if src not in self.screens or dst not in self.screens:
                raise ModelError(f"back edge {src!r} -> {dst!r} undefined")
        for trap in self.traps:
            missing = trap.screens - set(self.screens)
            if missing:
                raise ModelError(f"trap {trap.name!r} names undefined screens {sorted(missing)}")
        for sid, tpl in self.screens.items():
            if len(tpl.variant_leaves) > MAX_VARIANT_LEAVES:
                raise ModelError(f"{sid!r}: at most {MAX_VARIANT_LEAVES} cosmetic leaves")
            if len(tpl.variant_weights) != len(tpl.variant_leaves) + 1:
                raise ModelError(f"{sid!r}: need one variant weight per leaf count")
        # restarts only ever land on screens already reached, so edges and back suffice
        seen = {self.start_screen}
        frontier = [self.start_screen]
        while frontier:
            s = frontier.pop()
            nxt = [tr.target for _, tr in self.out_edges(s)]
            if s in self.back:
                nxt.append(self.back[s])
            for t in nxt:
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        unreachable = set(self.screens) - seen
        if unreachable:
            raise ModelError(f"unreachable screens: {sorted(unreachable)[:5]}")

    def variant_hierarchy(self, screen: str, k: int) -> UiHierarchy:
        tpl = self.screens[screen]
        root = tpl.root
        if k:
            root = UiNode(
                root.element_type, root.element_id, root.visible, root.bounds, root.text,
                root.children + tpl.variant_leaves[:k], root.enabled,
            )
        return UiHierarchy(tpl.activity, root)

    # ------------------------------------------------------------ JSON

    def to_json(self) -> dict:
        return {
            "app": self.app,
            "start_screen": self.start_screen,
            "back_weight": self.back_weight,
            "widget_oblivious": self.widget_oblivious,
            "screens": {
                sid: {
                    "activity": t.activity,
                    "hierarchy": node_to_json(t.root),
                    "variant_leaves": [node_to_json(v) for v in t.variant_leaves],
                    "variant_weights": list(t.variant_weights),
                }
                for sid, t in sorted(self.screens.items())
            },
            "edges": [
                {
                    "screen": src,
                    "path": path.to_json(),
                    "target": tr.target,
                    "kind": tr.kind,
                    "tag": tr.tag,
                    "sets_start": tr.sets_start,
                }
                for (src, path), tr in sorted(self.edges.items(), key=lambda kv: (kv[0][0], kv[0][1].steps))
            ],
            "back": dict(sorted(self.back.items())),
            "traps": [
                {
                    "name": t.name,
                    "screens": sorted(t.screens),
                    "min_dwell_ms": t.min_dwell_ms,
                    "p_escape": t.p_escape,
                    "max_entries": t.max_entries,
                    "escape": t.escape,
                    "kind": t.kind,
                }
                for t in self.traps
            ],
        }

    @classmethod
    def from_json(cls, raw: dict) -> AppModel:
        try:
            screens = {
                sid: ScreenTemplate(
                    activity=s["activity"],
                    root=node_from_json(s["hierarchy"], f"screens.{sid}"),
                    variant_leaves=tuple(node_from_json(v) for v in s.get("variant_leaves", [])),
                    variant_weights=tuple(float(w) for w in s.get("variant_weights", [1.0])),
                )
                for sid, s in raw["screens"].items()
            }
            edges = {}
            for e in raw["edges"]:
                key = (e["screen"], ElementPath.from_json(e["path"]))
                edges[key] = Transition(e["target"], e.get("kind", "click"), e.get("tag"), e.get("sets_start"))
            traps = [
                Trap(
                    name=t["name"],
                    screens=frozenset(t["screens"]),
                    min_dwell_ms=int(t["min_dwell_ms"]),
                    p_escape=float(t.get("p_escape", 0.01)),
                    max_entries=t.get("max_entries"),
                    escape=t.get("escape", "edge"),
                    kind=t.get("kind", "tarpit"),
                )
                for t in raw.get("traps", [])
            ]
            model = cls(
                app=raw["app"],
                start_screen=raw["start_screen"],
                screens=screens,
                edges=edges,
                back=dict(raw.get("back", {})),
                traps=traps,
                back_weight=float(raw.get("back_weight", 0.1)),
                widget_oblivious=bool(raw.get("widget_oblivious", False)),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ModelError(f"malformed model: {exc!r}") from exc
        model.validate()
        return model


def load_model(path: str | Path) -> AppModel:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return AppModel.from_json(raw)


def dump_model(model: AppModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_json(), sort_keys=True) + "\n", encoding="utf-8")
