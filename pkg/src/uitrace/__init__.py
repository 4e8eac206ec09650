"""Offline detection of ineffective exploration in UI-testing traces."""

from .abstraction import AbstractHierarchy, abstract, distinct_screens
from .analysis import analyze, report
from .fixes import FixDirective, RankedRegion, UnknownTrace, rank_regions, synthesize_fix
from .issues import AppProfile, IssueFinding, coverage_check, detect_logout, detect_unresponsive
from .params import DetectorParams
from .partition import DegenerateTrace, DivisionDomain, PartitionResult, compute_ep, detect_partition, partition_objective
from .regions import Region
from .similarity import MergeMap, merge, sim_check, token_sequence
from .tarpit import detect_tarpits, tarpit_objective
from .trace import (
    Action, ElementPath, InvariantError, ParseError, Trace, TraceEntry, UiHierarchy, UiNode,
    dump_trace, load_trace, resolve_path,
)

__version__ = "0.1.0"
