"""Exploration tarpits: long stretches spent in a handful of merged screen groups.

A window [l, r] scores ``groups(l..r) / (r - l + 1)``; lower is worse
exploration.  Screen groups come from one global greedy merge over all
distinct abstract screens of the trace.  The best window spanning at least
``t_min`` is taken, the segment it sits in is split around it, and the search
repeats on the leftovers until none of them spans ``t_min``.
"""

from __future__ import annotations

import numpy as np

from .abstraction import screen_index
from .params import DetectorParams
from .regions import Region, make_region
from .similarity import MergeMap, merge
from .trace import Trace


def merge_trace(trace: Trace, d_max: int = 3) -> MergeMap:
    return merge(screen_index(trace).screens, d_max)


def entry_groups(trace: Trace, groups: MergeMap) -> np.ndarray:
    """Dense group id for every entry (0-based positions)."""
    idx = screen_index(trace)
    dense: dict[bytes, int] = {}
    per_screen = []
    for s in idx.screens:
        root = groups.assignment[s.fingerprint]
        per_screen.append(dense.setdefault(root, len(dense)))
    return np.asarray([per_screen[s] for s in idx.ids], dtype=np.int64)


def previous_occurrence(gids) -> np.ndarray:
    """prev[j] = last position before j holding the same group, or -1."""
    seen: dict[int, int] = {}
    prev = np.empty(len(gids), dtype=np.int64)
    for j, g in enumerate(gids.tolist() if isinstance(gids, np.ndarray) else gids):
        prev[j] = seen.get(g, -1)
        seen[g] = j
    return prev


def tarpit_objective(trace: Trace, l: int, r: int, groups: MergeMap) -> float:
    if not 1 <= l <= r <= len(trace):
        raise IndexError(f"window [{l}, {r}] outside 1..{len(trace)}")
    idx = screen_index(trace)
    roots = {groups.assignment[idx.screens[s].fingerprint] for s in idx.ids[l - 1 : r]}
    return len(roots) / (r - l + 1)


def best_window(
    prev: np.ndarray,
    ts: np.ndarray,
    a: int,
    b: int,
    t_min_ms: int,
    constrained: bool = True,
) -> tuple[float, int, int] | None:
    """Minimum-ratio window inside 0-based segment [a, b].

    Returns (ratio, l, r) with 0-based l, r, or None when no window is
    feasible.  Ties prefer the longer window, then the earlier start.
    """
    best_ratio = np.inf
    best_l = best_r = -1
    for l in range(a, b + 1):
        if constrained:
            r_min = int(np.searchsorted(ts, ts[l] + t_min_ms, side="left"))
            if r_min > b:
                break
        else:
            r_min = l
        # any window starting at l holds at least one group
        if 1.0 / (b - l + 1) > best_ratio:
            break
        fresh = prev[l : b + 1] < l
        counts = np.cumsum(fresh)
        k0 = r_min - l
        ratio = counts[k0:] / np.arange(k0 + 1, b - l + 2)
        rev = ratio[::-1]
        k = len(ratio) - 1 - int(np.argmin(rev))
        value = float(ratio[k])
        r = r_min + k
        if value < best_ratio or (value == best_ratio and r - l > best_r - best_l):
            best_ratio, best_l, best_r = value, l, r
    if best_l < 0:
        return None
    return best_ratio, best_l, best_r


def detect_tarpits(
    trace: Trace,
    params: DetectorParams = DetectorParams(),
    groups: MergeMap | None = None,
) -> list[Region]:
    """Every selected window, best first per segment, returned sorted by start.

    No objective ceiling is applied here; see :func:`reportable`.
    """
    if groups is None:
        groups = merge_trace(trace, params.d_max)
    n = len(trace)
    ts = np.asarray(trace.timestamps, dtype=np.int64)
    prev = previous_occurrence(entry_groups(trace, groups))
    t_min = params.t_min_ms
    constrained = not params.tarpit_unconstrained
    regions: list[Region] = []
    pending = [(0, n - 1)]
    while pending:
        a, b = pending.pop()
        if a > b or ts[b] - ts[a] < t_min:
            continue
        found = best_window(prev, ts, a, b, t_min, constrained)
        if found is None:
            continue
        ratio, l, r = found
        if ts[r] - ts[l] >= t_min:
            regions.append(make_region(trace, l + 1, r + 1, "tarpit", ratio))
        pending.append((r + 1, b))
        pending.append((a, l - 1))
    regions.sort(key=lambda reg: reg.start)
    return regions


def reportable(regions: list[Region], ceiling: float) -> list[Region]:
    return [r for r in regions if r.score <= ceiling]
