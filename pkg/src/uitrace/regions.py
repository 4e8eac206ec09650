"""Regions of ineffective exploration and time-overlap arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .trace import Trace

REGION_KINDS = ("partition", "tarpit")


@dataclass(frozen=True)
class Region:
    start: int
    end: int
    kind: str
    score: float
    span_ms: int
    destructive_index: int | None
    trace_id: str

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if not 1 <= self.start <= self.end:
            raise ValueError(f"bad region bounds [{self.start}, {self.end}]")

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "kind": self.kind,
            "score": self.score,
            "span_ms": self.span_ms,
            "destructive_index": self.destructive_index,
            "trace_id": self.trace_id,
        }

    @classmethod
    def from_json(cls, raw: dict) -> Region:
        return cls(
            start=int(raw["start"]),
            end=int(raw["end"]),
            kind=str(raw["kind"]),
            score=float(raw["score"]),
            span_ms=int(raw["span_ms"]),
            destructive_index=None if raw.get("destructive_index") is None else int(raw["destructive_index"]),
            trace_id=str(raw["trace_id"]),
        )


def make_region(trace: Trace, l: int, r: int, kind: str, score: float) -> Region:
    return Region(
        start=l,
        end=r,
        kind=kind,
        score=score,
        span_ms=trace.time(r) - trace.time(l),
        destructive_index=l - 1 if l > 1 else None,
        trace_id=trace.trace_id,
    )


def interval(trace: Trace, start: int, end: int) -> tuple[int, int]:
    return trace.time(start), trace.time(end)


def overlap_ms(a: tuple[int, int], b: tuple[int, int]) -> int | None:
    """Length of the intersection of two closed time intervals, None if disjoint."""
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if hi < lo:
        return None
    return hi - lo


def covers_half(target: tuple[int, int], cover: tuple[int, int]) -> bool:
    ov = overlap_ms(target, cover)
    return ov is not None and 2 * ov >= target[1] - target[0]


def union_overlap_ms(target: tuple[int, int], covers: Iterable[tuple[int, int]]) -> int | None:
    """Total length of ``target`` covered by the union of ``covers``."""
    pieces = []
    for c in covers:
        lo, hi = max(target[0], c[0]), min(target[1], c[1])
        if hi >= lo:
            pieces.append((lo, hi))
    if not pieces:
        return None
    pieces.sort()
    total = 0
    cur_lo, cur_hi = pieces[0]
    for lo, hi in pieces[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + cur_hi - cur_lo
