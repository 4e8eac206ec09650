"""Seeded random explorer over an :class:`AppModel`.

One action per ``action_period_ms`` on a simulated clock.  The explorer picks
uniformly among the enabled clickable elements of the current screen, plus a
back press with the model's ``back_weight``.  Trap subspaces hold the explorer
for their minimum dwell, then let it out with probability ``p_escape`` per
action.  Fix directives are consulted before every action.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..abstraction import abstract, screen_index
from ..fixes import FixDirective, apply_directive
from ..trace import Action, ElementPath, ParseError, Trace, TraceEntry, UiHierarchy, resolve_path
from .model import AppModel, Trap

SCENARIOS = ("benign", "logout", "tarpit", "tarpit_x2", "ad_freeze", "mixed")
INJECTED_T_MIN_MS = 10 * 60 * 1000


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    seed: int = 0
    duration_ms: int = 60 * 60 * 1000
    action_period_ms: int = 1000

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.name!r}")
        if self.action_period_ms <= 0 or self.duration_ms < 0:
            raise ValueError("need a positive action period and non-negative duration")
        if self.name != "benign" and self.duration_ms < 2 * INJECTED_T_MIN_MS:
            raise ValueError("injected scenarios need duration >= 2 * t_min")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "duration_ms": self.duration_ms,
            "action_period_ms": self.action_period_ms,
        }


def load_scenario(path: str | Path) -> ScenarioSpec:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return ScenarioSpec(
            raw["name"], int(raw.get("seed", 0)), int(raw.get("duration_ms", 3_600_000)),
            int(raw.get("action_period_ms", 1000)),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad scenario: {exc}") from exc


@dataclass
class GroundTruthLog:
    regions: list[tuple[str, int, int]] = field(default_factory=list)
    destructive: list[tuple[int, ElementPath | None]] = field(default_factory=list)
    distinct_screens: int = 0

    def to_json(self) -> dict:
        return {
            "regions": [list(r) for r in self.regions],
            "destructive": [[i, None if p is None else p.to_json()] for i, p in self.destructive],
            "distinct_screens": self.distinct_screens,
        }

    @classmethod
    def from_json(cls, raw: dict) -> GroundTruthLog:
        return cls(
            [(k, int(s), int(e)) for k, s, e in raw["regions"]],
            [(int(i), None if p is None else ElementPath.from_json(p)) for i, p in raw["destructive"]],
            int(raw.get("distinct_screens", 0)),
        )


class _Screens:
    """Concrete hierarchies and their fingerprints, shared across visits."""

    def __init__(self, model: AppModel):
        self.model = model
        self._h: dict[tuple, UiHierarchy] = {}
        self._fp: dict[tuple[str, int], str] = {}

    def get(self, sid: str, k: int) -> tuple[UiHierarchy, str]:
        key = (sid, k)
        h = self._h.get(key)
        if h is None:
            h = self.model.variant_hierarchy(sid, k)
            self._h[key] = h
            self._fp[key] = abstract(h).hex
        return h, self._fp[key]

    def disabled(self, sid: str, k: int, directives: tuple[FixDirective, ...]) -> UiHierarchy:
        key = (sid, k, directives)
        h = self._h.get(key)
        if h is None:
            h, fp = self.get(sid, k)
            for d in directives:
                h = apply_directive(h, d, fp)
            self._h[key] = h
        return h


def _center(h: UiHierarchy, path: ElementPath) -> tuple[int, int] | None:
    node = resolve_path(h, path)
    if node is None:
        return None
    l, t, r, b = node.bounds
    return (l + r) // 2, (t + b) // 2


def _run(model: AppModel, spec: ScenarioSpec, fixes: tuple[FixDirective, ...]):
    rng = random.Random(spec.seed)
    screens = _Screens(model)
    disable_by_fp: dict[str, list[FixDirective]] = {}
    restart_fps: set[str] = set()
    for d in fixes:
        if d.kind == "disable_element":
            disable_by_fp.setdefault(d.screen_fingerprint, []).append(d)
        else:
            restart_fps.add(d.screen_fingerprint)

    n_steps = spec.duration_ms // spec.action_period_ms + 1
    cur = model.start_screen
    start = model.start_screen
    trap_entries: dict[str, int] = {t.name: 0 for t in model.traps}
    trap_since: int | None = None
    episode_start: int | None = None
    truth = GroundTruthLog()
    entries: list[TraceEntry] = []

    for step in range(n_steps):
        index = step + 1
        now = step * spec.action_period_ms
        tpl = model.screens[cur]
        k = rng.choices(range(len(tpl.variant_weights)), tpl.variant_weights)[0] if tpl.variant_leaves else 0
        h, fp = screens.get(cur, k)
        disabled = tuple(d for d in disable_by_fp.get(fp, ()) if resolve_path(h, d.element_path) is not None)
        if disabled:
            h = screens.disabled(cur, k, disabled)
        trap = model.trap_of(cur)

        if index == n_steps:
            entries.append(TraceEntry(now, h, Action("none")))
            break

        blocked = {d.element_path for d in disabled}
        if fp in restart_fps:
            choice = (Action("restart"), start, None)
        else:
            since = now if trap_since is None else trap_since
            choice = _choose(model, rng, cur, start, h, trap, since, now, trap_entries, blocked)
        action, nxt, tr = choice
        entries.append(TraceEntry(now, h, action))

        if tr is not None and tr.tag == "logout":
            truth.destructive.append((index, action.target_path or _path_of(model, cur, tr)))
            truth.regions.append(("partition", index + 1, n_steps))
        if tr is not None and tr.sets_start is not None:
            start = tr.sets_start

        next_trap = model.trap_of(nxt)
        if next_trap is not None and trap is not next_trap:
            trap_entries[next_trap.name] += 1
            trap_since = now + spec.action_period_ms
            episode_start = index + 1
            truth.destructive.append((index, action.target_path or (_path_of(model, cur, tr) if tr else None)))
        elif next_trap is None and trap is not None:
            truth.regions.append((trap.kind, episode_start, index))
            trap_since = episode_start = None
        cur = nxt

    if episode_start is not None:
        truth.regions.append((model.trap_of(cur).kind, episode_start, len(entries)))
    truth.regions.sort(key=lambda r: r[1])
    trace = Trace(
        tool="sim-explorer",
        app=model.app,
        trace_id=f"{model.app}-{spec.name}-{spec.seed}",
        entries=tuple(entries),
    )
    truth.distinct_screens = len(screen_index(trace).screens)
    return trace, truth


def _path_of(model: AppModel, screen: str, tr) -> ElementPath | None:
    for path, t in model.out_edges(screen):
        if t is tr:
            return path
    return None


def _choose(model, rng, cur, start, h, trap: Trap | None, trap_since, now, trap_entries, blocked):
    back_target = model.back.get(cur, cur)
    edges = [(p, t) for p, t in model.out_edges(cur) if p not in blocked]
    if trap is None:
        usable = []
        for p, t in edges:
            target_trap = model.trap_of(t.target)
            if target_trap is not None and target_trap.max_entries is not None:
                if trap_entries[target_trap.name] >= target_trap.max_entries:
                    continue
            usable.append((p, t))
        return _pick(model, rng, cur, h, usable, back_target, model.back_weight)

    inside = [(p, t) for p, t in edges if t.target in trap.screens]
    outside = [(p, t) for p, t in edges if t.target not in trap.screens]
    back_inside = back_target in trap.screens
    if now - trap_since >= trap.min_dwell_ms and rng.random() < trap.p_escape:
        if trap.escape == "restart":
            return Action("restart"), start, None
        options = outside + ([] if back_inside else [(None, None)])
        if options:
            p, t = options[rng.randrange(len(options))]
            if p is None:
                return Action("back"), back_target, None
            return _click(model, h, p, t), t.target, t
    return _pick(model, rng, cur, h, inside, back_target if back_inside else cur, model.back_weight)


def _pick(model, rng, cur, h, edges, back_target, back_weight):
    total = len(edges) + back_weight
    x = rng.random() * total
    if x >= len(edges):
        return Action("back"), back_target, None
    p, t = edges[int(x)]
    return _click(model, h, p, t), t.target, t


def _click(model: AppModel, h: UiHierarchy, path: ElementPath, tr) -> Action:
    point = _center(h, path)
    text = "hello" if tr.kind == "text_input" else None
    if model.widget_oblivious:
        return Action(tr.kind, None, point, text)
    return Action(tr.kind, path, point, text)


def generate(model: AppModel, spec: ScenarioSpec) -> tuple[Trace, GroundTruthLog]:
    model.validate()
    return _run(model, spec, ())


def apply_fixes_and_rerun(model: AppModel, spec: ScenarioSpec, fixes) -> tuple[Trace, int]:
    trace, _ = _run(model, spec, tuple(fixes))
    return trace, coverage(trace)


def run_with_fixes(model: AppModel, spec: ScenarioSpec, fixes) -> tuple[Trace, GroundTruthLog]:
    return _run(model, spec, tuple(fixes))


def coverage(trace: Trace) -> int:
    """Distinct abstract screens visited."""
    return len(screen_index(trace).screens)


def model_fingerprints(model: AppModel) -> set[str]:
    """Every abstract fingerprint the model can display."""
    out = set()
    for sid, tpl in model.screens.items():
        for k in range(len(tpl.variant_leaves) + 1):
            out.add(abstract(model.variant_hierarchy(sid, k)).hex)
    return out


def unmatched_directives(model: AppModel, fixes) -> list[FixDirective]:
    known = model_fingerprints(model)
    return [d for d in fixes if d.screen_fingerprint not in known]
