"""Exploration space partition: a destructive action after which the tool
never returns to the UI subspace it was exploring.

The boundary ``n`` minimizes

    |{S[1,n]} & {S[n+1,N]}| / (N - n) + 2 * sigmoid(|{S[n+1,N]}| / |{S[Ep+1,N]}| - 1) - 1

over ``1 <= n < Ep``, where ``Ep`` is the index whose distance to the end of
the trace is closest to ``t_min``.  The optimum is kept only if the explored
space shrank: ``|{S[1,n]}| > |{S[n+1,N]}|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .abstraction import screen_index
from .params import DetectorParams
from .regions import Region, make_region
from .trace import Action, Trace


class DegenerateTrace(ValueError):
    """Trace too short for the partition search."""


class DivisionDomain(ZeroDivisionError):
    """The tail window S[Ep+1, N] is empty."""


@dataclass(frozen=True)
class PartitionResult:
    boundary_index: int
    region: Region
    objective_value: float
    destructive_action: Action
    accepted: bool


def sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def compute_ep(trace: Trace, t_min_ms: int) -> int:
    n = len(trace)
    if n < 2:
        raise DegenerateTrace("need at least two entries")
    ts = trace.timestamps
    t_end = ts[-1]
    best, best_gap = 1, None
    for i, t in enumerate(ts, start=1):
        gap = abs((t_end - t) - t_min_ms)
        if best_gap is None or gap < best_gap:
            best, best_gap = i, gap
    return best


@dataclass(frozen=True)
class _Counts:
    """Per-n set sizes, index 0 unused so position n means boundary S_n."""

    n: int
    intersection: list[int]  # |{S[1,n]} & {S[n+1,N]}|
    prefix: list[int]  # |{S[1,n]}|
    suffix: list[int]  # |{S[n+1,N]}|


def _set_counts(ids: list[int]) -> _Counts:
    # one sweep from first/last occurrence of every screen
    n = len(ids)
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for i, s in enumerate(ids, start=1):
        first.setdefault(s, i)
        last[s] = i
    delta = [0] * (n + 2)
    opened = [0] * (n + 2)
    closed_at = [0] * (n + 2)
    for s, f in first.items():
        g = last[s]
        opened[f] += 1
        closed_at[g] += 1
        if g > f:
            delta[f] += 1
            delta[g] -= 1
    inter = [0] * (n + 1)
    prefix = [0] * (n + 1)
    running = seen = 0
    for i in range(1, n + 1):
        running += delta[i]
        seen += opened[i]
        inter[i] = running
        prefix[i] = seen
    suffix = [0] * (n + 1)
    alive = 0
    for i in range(n, 0, -1):
        alive += closed_at[i]  # screens last seen at or after i
        suffix[i - 1] = alive
    suffix[n] = 0
    return _Counts(n, inter, prefix, suffix)


def objective_profile(trace: Trace, ep: int) -> list[float]:
    """F(n) for n = 1..ep-1 (list position n-1)."""
    ids = screen_index(trace).ids
    counts = _set_counts(ids)
    return _profile(counts, ep)


def _profile(counts: _Counts, ep: int) -> list[float]:
    n_total = counts.n
    tail = counts.suffix[ep]
    if tail == 0:
        raise DivisionDomain(f"S[{ep + 1},{n_total}] is empty")
    out = []
    for n in range(1, ep):
        first = counts.intersection[n] / (n_total - n)
        out.append(first + 2.0 * sigmoid(counts.suffix[n] / tail - 1.0) - 1.0)
    return out


def partition_objective(trace: Trace, n: int, ep: int) -> float:
    if not 1 <= n < ep <= len(trace):
        raise ValueError(f"need 1 <= n < Ep <= N, got n={n}, Ep={ep}")
    return objective_profile(trace, ep)[n - 1]


def detect_partition(trace: Trace, params: DetectorParams = DetectorParams()) -> PartitionResult:
    n_total = len(trace)
    if n_total < 3:
        raise DegenerateTrace(f"partition search needs N >= 3, got {n_total}")
    ep = compute_ep(trace, params.t_min_ms)
    if ep < 2:
        raise DegenerateTrace("trace shorter than t_min: Ep = 1")
    if ep == n_total:
        raise DegenerateTrace("last gap exceeds t_min: Ep = N leaves an empty tail")
    counts = _set_counts(screen_index(trace).ids)
    values = _profile(counts, ep)
    best_n = 1
    best = values[0]
    for n, v in enumerate(values[1:], start=2):
        if v < best:
            best_n, best = n, v
    accepted = counts.prefix[best_n] > counts.suffix[best_n]
    return PartitionResult(
        boundary_index=best_n,
        region=make_region(trace, best_n + 1, n_total, "partition", best),
        objective_value=best,
        destructive_action=trace.at(best_n).action,
        accepted=accepted,
    )
