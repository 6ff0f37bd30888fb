"""Influence-aware user recommendation toolkit.

Builds recommendation lists that spread: a two-stage invite/accept diffusion
model over a weighted attributed graph, capacity-limited influence scoring,
reverse-reachable-set sampling with greedy coverage selection and shared-set
reranking, plus the offline metric suite to evaluate everything against
logged spread events.
"""

__version__ = "0.1.0"

from . import errors
from .diffusion import CascadeResult, exact_influence, mc_influence, simulate_cascade
from .eventlog import EventLog, load_event_log, replay_trajectories, save_event_log
from .graph import (
    Graph,
    build_graph,
    derive_candidates,
    load_graph,
    load_inviters,
    save_graph,
    save_id_map,
    save_inviters,
)
from .influence import (
    InfluenceScores,
    coreness_influence,
    coreness_scores,
    degree_influence,
    degree_scores,
    hetero_inf,
    hetero_inf_all,
    heteroinf_scores,
    load_scores,
    mc_scores,
    save_scores,
)
from .metrics import (
    EvalReport,
    SpreadResult,
    hit_at_k,
    ndcg_at_k,
    recall_at_k,
    spread_eval,
)
from .recommend import (
    RecommendationTable,
    hetero_im,
    hetero_ir,
    load_recommendations,
    ppr_recommend,
    ppr_scores,
    ppr_table,
    save_recommendations,
)
from .rrset import (
    DEFAULT_RN_CAP,
    RNParameters,
    RNResult,
    RRSetCollection,
    compute_rn,
    rn_for_graph,
    sample_rr_sets,
)
from .synth import SynthConfig, generate_event_log, generate_graph, pick_inviters

__all__ = [
    "CascadeResult",
    "EvalReport",
    "EventLog",
    "Graph",
    "InfluenceScores",
    "RNParameters",
    "RNResult",
    "RRSetCollection",
    "RecommendationTable",
    "SpreadResult",
    "SynthConfig",
    "DEFAULT_RN_CAP",
    "build_graph",
    "compute_rn",
    "coreness_influence",
    "coreness_scores",
    "degree_influence",
    "degree_scores",
    "derive_candidates",
    "errors",
    "exact_influence",
    "generate_event_log",
    "generate_graph",
    "hetero_im",
    "hetero_inf",
    "hetero_inf_all",
    "hetero_ir",
    "heteroinf_scores",
    "hit_at_k",
    "load_event_log",
    "load_graph",
    "load_inviters",
    "load_recommendations",
    "load_scores",
    "mc_influence",
    "mc_scores",
    "ndcg_at_k",
    "pick_inviters",
    "ppr_recommend",
    "ppr_scores",
    "ppr_table",
    "recall_at_k",
    "replay_trajectories",
    "rn_for_graph",
    "sample_rr_sets",
    "save_event_log",
    "save_graph",
    "save_id_map",
    "save_inviters",
    "save_recommendations",
    "save_scores",
    "simulate_cascade",
    "spread_eval",
]
