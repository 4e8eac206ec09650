"""Detection quality against simulator ground truth."""

from __future__ import annotations

from dataclasses import dataclass

from ..regions import Region, covers_half, interval, overlap_ms
from ..trace import Trace
from .explorer import GroundTruthLog


@dataclass(frozen=True)
class DetectionMetrics:
    precision: float
    recall: float
    mean_overlap: float
    true_regions: int
    reported_regions: int


def evaluate_detection(regions: list[Region], truth: GroundTruthLog, trace: Trace) -> DetectionMetrics:
    """Half-overlap matching in time.

    A truth region is recalled when one reported region covers at least half
    its span; a reported region is correct when it covers at least half of a
    truth region or lies at least half inside one.  Empty denominators count
    as perfect.
    """
    truths = [interval(trace, s, e) for _, s, e in truth.regions]
    reports = [interval(trace, r.start, r.end) for r in regions]
    recalled = sum(1 for t in truths if any(covers_half(t, r) for r in reports))
    correct = sum(
        1 for r in reports if any(covers_half(t, r) or covers_half(r, t) for t in truths)
    )
    fractions = []
    for t in truths:
        span = t[1] - t[0]
        best = 0.0
        for r in reports:
            ov = overlap_ms(t, r)
            if ov is not None:
                best = max(best, 1.0 if span == 0 else ov / span)
        fractions.append(best)
    return DetectionMetrics(
        precision=correct / len(reports) if reports else 1.0,
        recall=recalled / len(truths) if truths else 1.0,
        mean_overlap=sum(fractions) / len(fractions) if fractions else 1.0,
        true_regions=len(truths),
        reported_regions=len(reports),
    )
