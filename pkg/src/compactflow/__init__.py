"""Max-flow solvers built around per-phase compact networks."""

from .core import (Arc, ArcClass, FlowNetwork, ResidualState, Verdict,
                   classify_arc, compaction_capacity, residual_capacity,
                   verify_flow, verify_preflow)
from .io import ParseError, StatsRecord, parse_dimacs, write_dimacs, write_stats
from .dyntree import DynForest
from .transform import (DegreeReduction, InOutSplit, infinite_capacity,
                        map_flow_back, split_in_out, to_bounded_degree)
from .compact import (CompactNetwork, Pseudoarc, PseudoarcBuilder,
                      build_compact, restore_all_flows)
from .engine import (DualLabels, InvariantViolation, MaxFlowResult, PhaseStats,
                     PushOutcome, RunStats, ScalingState, global_relabel,
                     initialize, max_flow)
from .baselines import (CutCertificate, NotMaximalError, PathFlow, ahuja_orlin,
                        decompose_flow, edmonds_karp, goldberg_tarjan,
                        min_cut_check)
from .cli import GeneratorSpec, generate

__version__ = "0.1.0"

__all__ = [
    "Arc", "ArcClass", "FlowNetwork", "ResidualState", "Verdict",
    "classify_arc", "compaction_capacity", "residual_capacity",
    "verify_flow", "verify_preflow",
    "ParseError", "StatsRecord", "parse_dimacs", "write_dimacs", "write_stats",
    "DynForest",
    "DegreeReduction", "InOutSplit", "infinite_capacity", "map_flow_back",
    "split_in_out", "to_bounded_degree",
    "CompactNetwork", "Pseudoarc", "PseudoarcBuilder", "build_compact",
    "restore_all_flows",
    "DualLabels", "InvariantViolation", "MaxFlowResult", "PhaseStats",
    "PushOutcome", "RunStats", "ScalingState", "global_relabel", "initialize",
    "max_flow",
    "CutCertificate", "NotMaximalError", "PathFlow", "ahuja_orlin",
    "decompose_flow", "edmonds_karp", "goldberg_tarjan", "min_cut_check",
    "GeneratorSpec", "generate",
    "__version__",
]
