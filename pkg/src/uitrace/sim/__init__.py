"""App/explorer simulator producing ground-truth traces."""

from .builders import model_for, profile_for
from .explorer import (
    GroundTruthLog,
    ScenarioSpec,
    apply_fixes_and_rerun,
    coverage,
    generate,
    load_scenario,
    unmatched_directives,
)
from .metrics import DetectionMetrics, evaluate_detection
from .model import AppModel, ModelError, dump_model, load_model

__all__ = [
    "AppModel",
    "DetectionMetrics",
    "GroundTruthLog",
    "ModelError",
    "ScenarioSpec",
    "apply_fixes_and_rerun",
    "coverage",
    "dump_model",
    "evaluate_detection",
    "generate",
    "load_model",
    "load_scenario",
    "model_for",
    "profile_for",
    "unmatched_directives",
]
