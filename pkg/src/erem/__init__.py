"""erem: joint entity and relation alignment over knowledge graph pairs.

The engine alternates two optimal-transport matching problems — one over
entities, one over relations — and lets each side's confident matches
(anchors) reinforce the other through structural award matrices.
"""

from .anchors import (
    AnchorSet,
    derive_hard_entity_anchors,
    derive_hard_relation_anchors,
    init_anchor_set,
    promote_anchors,
)
from .award import (
    AssembledCost,
    AwardMatrix,
    assemble_entity_cost,
    assemble_relation_cost,
    entity_award_matrices,
    relation_award_matrix,
)
from .em import (
    AlignmentResult,
    EremConfig,
    GraphBundle,
    IterationRecord,
    anchor_objective,
    load_config,
    run_alignment,
)
from .embeddings import (
    CostMatrix,
    EmbeddingTable,
    cosine_cost_matrix,
    load_embedding_table,
    save_embedding_table,
    synth_embedding_table,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    DataError,
    EremError,
    FormatError,
    ParseError,
    ReferentialError,
)
from .estimator import EntityRelationAligner
from .kg import KnowledgeGraph, RelationGraph, kgt_transform, parse_graph
from .metrics import GroundTruth, MetricsReport, evaluate_plan, hits_at_k, mrr, rank_targets
from .oracle import (
    AnchorOracle,
    OracleAnswer,
    OracleQuery,
    ReplayOracle,
    build_prompt,
    replay_oracle_answer,
    top_k_candidates,
)
from .ot import TransportPlan, exact_min_cost_matching, sinkhorn_plan
from .synth import SynthPair, SynthSpec, generate_pair

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AnchorOracle",
    "AnchorSet",
    "AssembledCost",
    "AwardMatrix",
    "ConfigError",
    "ConsistencyError",
    "CostMatrix",
    "DataError",
    "EmbeddingTable",
    "EntityRelationAligner",
    "EremConfig",
    "EremError",
    "FormatError",
    "GraphBundle",
    "GroundTruth",
    "IterationRecord",
    "KnowledgeGraph",
    "MetricsReport",
    "OracleAnswer",
    "OracleQuery",
    "ParseError",
    "ReferentialError",
    "RelationGraph",
    "ReplayOracle",
    "SynthPair",
    "SynthSpec",
    "TransportPlan",
    "anchor_objective",
    "assemble_entity_cost",
    "assemble_relation_cost",
    "build_prompt",
    "cosine_cost_matrix",
    "derive_hard_entity_anchors",
    "derive_hard_relation_anchors",
    "entity_award_matrices",
    "evaluate_plan",
    "exact_min_cost_matching",
    "generate_pair",
    "hits_at_k",
    "init_anchor_set",
    "kgt_transform",
    "load_config",
    "load_embedding_table",
    "mrr",
    "parse_graph",
    "promote_anchors",
    "rank_targets",
    "relation_award_matrix",
    "replay_oracle_answer",
    "run_alignment",
    "save_embedding_table",
    "sinkhorn_plan",
    "synth_embedding_table",
    "top_k_candidates",
]
