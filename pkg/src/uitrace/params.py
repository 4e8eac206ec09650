"""Detector parameters shared by the analysis pipeline and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass

DEFAULT_T_MIN_MS = 10 * 60 * 1000
DEFAULT_D_MAX = 3
# Calibrated on 20 benign simulator walks; see scripts/calibrate_ceiling.py.
DEFAULT_TARPIT_CEILING = 0.005


@dataclass(frozen=True)
class DetectorParams:
    t_min_ms: int = DEFAULT_T_MIN_MS
    d_max: int = DEFAULT_D_MAX
    tarpit_ceiling: float = DEFAULT_TARPIT_CEILING
    tarpit_unconstrained: bool = False
    coverage_union: bool = False

    def __post_init__(self):
        if self.t_min_ms <= 0:
            raise ValueError("t_min must be positive")
        if self.d_max < 0:
            raise ValueError("d_max must be non-negative")

    def to_json(self) -> dict:
        return asdict(self)
