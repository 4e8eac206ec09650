from __future__ import annotations

import functools
import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from uitrace.experiments import run_scenario
from uitrace.trace import Action, Trace, TraceEntry, UiHierarchy, UiNode

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FULL = (0, 0, 1080, 1920)
MINUTE = 60_000


def leaf(etype="TextView", eid=None, bounds=FULL, visible=True, text=None):
    return UiNode(etype, eid, visible, bounds, text)


def node(etype="FrameLayout", eid=None, children=(), bounds=FULL, visible=True):
    return UiNode(etype, eid, visible, bounds, None, tuple(children))


def screen(tag, activity="MainActivity", extra=0):
    """Distinct screen per ``tag``; ``extra`` appends cosmetic leaves."""
    kids = [leaf("Button", f"{tag}:b{k}") for k in range(3)]
    kids += [leaf("TipView", f"tip{k}") for k in range(extra)]
    return UiHierarchy(activity, node("FrameLayout", f"root:{tag}", kids))


def trace_of(tags, period_ms=1000, times=None, trace_id="t", tool="tool", app="app", actions=None):
    """Trace visiting ``screen(tag)`` for each tag; hierarchies shared per tag."""
    cache = {}
    entries = []
    n = len(tags)
    for i, tag in enumerate(tags):
        h = cache.get(tag)
        if h is None:
            h = cache[tag] = screen(tag) if not isinstance(tag, UiHierarchy) else tag
        t = times[i] if times is not None else i * period_ms
        if actions is not None:
            a = actions[i]
        else:
            a = Action("none") if i == n - 1 else Action("back")
        entries.append(TraceEntry(t, h, a))
    return Trace(tool, app, trace_id, tuple(entries))


def random_tree(rng: random.Random, n_nodes: int, types=("A", "B", "C"), ids=(None, "x", "y")) -> UiNode:
    parents = [None] + [rng.randrange(k) for k in range(1, n_nodes)]
    kids: dict[int, list[int]] = {}
    for k, p in enumerate(parents[1:], start=1):
        kids.setdefault(p, []).append(k)

    def build(k):
        return UiNode(rng.choice(types), rng.choice(ids), True, FULL, None, tuple(build(c) for c in kids.get(k, ())))

    return build(0)


# --- hypothesis strategies -------------------------------------------------

coords = st.integers(min_value=-200, max_value=2200)


@st.composite
def rects(draw):
    x1, x2 = sorted((draw(coords), draw(coords)))
    y1, y2 = sorted((draw(coords), draw(coords)))
    return (x1, y1, x2, y2)


@st.composite
def ui_trees(draw, max_depth=3):
    def build(depth):
        n_kids = draw(st.integers(0, 3)) if depth < max_depth else 0
        return UiNode(
            draw(st.sampled_from(["FrameLayout", "Button", "TextView"])),
            draw(st.sampled_from([None, "a", "b"])),
            draw(st.booleans()),
            draw(rects()),
            draw(st.sampled_from([None, "hi"])),
            tuple(build(depth + 1) for _ in range(n_kids)),
        )

    return build(0)


@st.composite
def screen_sequences(draw, max_len=60, alphabet=8):
    return draw(st.lists(st.integers(0, alphabet - 1), min_size=3, max_size=max_len))


# --- shared simulator runs ---------------------------------------------------


@functools.lru_cache(maxsize=None)
def cached_run(scenario: str, seed: int):
    return run_scenario(scenario, seed)


@pytest.fixture
def run_cache():
    return cached_run


# --- CLI pipeline -------------------------------------------------------------


def cli_pipeline(workdir, scenario="logout", seed=0, top_k=1):
    """make-model, simulate, analyze, rank, emit-fixes, simulate --fixes.

    Returns ``{step: (exit_code, stdout, stderr)}``; every artifact lands in
    ``workdir``.
    """
    import contextlib
    import io

    from uitrace.cli import main

    w = str(workdir)
    steps = {
        "make-model": ["make-model", "--scenario", scenario, "--seed", str(seed), "--out", f"{w}/model.json",
                       "--scenario-out", f"{w}/scenario.json", "--profile-out", f"{w}/profile.json"],
        "simulate": ["simulate", "--model", f"{w}/model.json", "--scenario", f"{w}/scenario.json",
                     "--out", f"{w}/trace.json", "--truth-out", f"{w}/truth.json"],
        "analyze": ["analyze", f"{w}/trace.json", "--profile", f"{w}/profile.json", "--out-dir", f"{w}/reports",
                    "--top-k", str(top_k)],
    }
    out = {}

    def run(name, argv):
        o, e = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(o), contextlib.redirect_stderr(e):
            code = main(argv)
        out[name] = (code, o.getvalue(), e.getvalue())
        return code

    for name, argv in steps.items():
        if run(name, argv):
            return out
    reports = sorted(str(p) for p in (workdir / "reports").glob("*.report.json"))
    run("rank", ["rank", *reports])
    run("emit-fixes", ["emit-fixes", *reports, "--top-k", str(top_k), "--out", f"{w}/fixes.json"])
    run("simulate-fixed", ["simulate", "--model", f"{w}/model.json", "--scenario", f"{w}/scenario.json",
                           "--fixes", f"{w}/fixes.json", "--out", f"{w}/trace_fixed.json",
                           "--truth-out", f"{w}/truth_fixed.json"])
    return out


# --- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {number} {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
