"""Timing run: tarpit detection (global merge included) on a large synthetic trace.

2000 distinct abstract screens of about 30 nodes (500 base layouts, each in
four cosmetic variants) spread over 20000 entries, one per second, with a
two-screen dwell in the middle.

    python3 scripts/perf_tarpit.py [--screens 2000] [--entries 20000] [--seed 0]
"""

from __future__ import annotations

import argparse
import random
import time

from uitrace.abstraction import screen_index
from uitrace.params import DetectorParams
from uitrace.tarpit import detect_tarpits, entry_groups, merge_trace
from uitrace.trace import Action, Trace, TraceEntry, UiHierarchy, UiNode

TYPES = ("LinearLayout", "FrameLayout", "TextView", "Button", "ImageView", "RecyclerView", "CheckBox")


def base_tree(rng: random.Random, tag: int, n_nodes: int) -> UiNode:
    """Random ordered tree with ``n_nodes`` nodes, ids unique to this layout."""
    parents = [None] + [rng.randrange(k) for k in range(1, n_nodes)]
    kids: dict[int, list[int]] = {}
    for k, p in enumerate(parents[1:], start=1):
        kids.setdefault(p, []).append(k)

    def build(k: int) -> UiNode:
        children = tuple(build(c) for c in kids.get(k, ()))
        return UiNode(rng.choice(TYPES), f"L{tag}:n{k}", True, (0, 0, 1080, 1920), None, children)

    return build(0)


def synthetic_trace(n_screens: int, n_entries: int, seed: int = 0) -> Trace:
    rng = random.Random(seed)
    hierarchies = []
    for tag in range(n_screens // 4):
        root = base_tree(rng, tag, rng.randint(26, 30))
        for k in range(4):
            extra = tuple(UiNode("TipView", f"tip{j}", True, (0, 1800, 1080, 1900)) for j in range(k))
            node = UiNode(root.element_type, root.element_id, True, root.bounds, None, root.children + extra)
            hierarchies.append(UiHierarchy(f"Activity{tag % 40}", node))
    trap = hierarchies[:2]
    entries = []
    dwell = range(n_entries // 2, n_entries // 2 + 1800)
    for i in range(n_entries):
        # every screen shows up at least once; the middle half hour cycles two screens
        if i in dwell:
            h = trap[i % 2]
        elif i < len(hierarchies):
            h = hierarchies[i]
        else:
            h = rng.choice(hierarchies)
        kind = "none" if i == n_entries - 1 else "back"
        entries.append(TraceEntry(i * 1000, h, Action(kind)))
    return Trace("synthetic", "perf-app", f"perf-{seed}", tuple(entries))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--screens", type=int, default=2000)
    ap.add_argument("--entries", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    trace = synthetic_trace(args.screens, args.entries, args.seed)
    t0 = time.perf_counter()
    distinct = len(screen_index(trace).screens)
    t1 = time.perf_counter()
    groups = merge_trace(trace)
    t2 = time.perf_counter()
    regions = detect_tarpits(trace, DetectorParams(), groups)
    t3 = time.perf_counter()
    print(f"entries={len(trace)} distinct={distinct} groups={len(groups.roots)} "
          f"distinct_groups_seen={len(set(entry_groups(trace, groups).tolist()))}")
    print(f"abstraction {t1 - t0:.1f}s  merge {t2 - t1:.1f}s  search {t3 - t2:.1f}s  total {t3 - t0:.1f}s")
    for r in regions:
        print(f"  region [{r.start},{r.end}] span={r.span_ms / 60000:.1f} min score={r.score:.5f}")


if __name__ == "__main__":
    main()
