"""The alternating expectation-maximization driver.

One run seeds entity and relation anchors from embedding cosine costs,
then alternates an entity-matching step (boosted by relation anchors)
with a relation-matching step (boosted by hard entity anchors).  Each
step rebuilds its award matrices, solves an entropic transport problem,
and promotes confident plan entries to new anchors.  Anchors are never
retracted.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .anchors import (
    AnchorSet,
    HARD,
    derive_hard_entity_anchors,
    derive_hard_relation_anchors,
    init_anchor_set,
    promote_anchors,
)
from .award import (
    AssembledCost,
    assemble_entity_cost,
    assemble_relation_cost,
    entity_award_matrices,
    relation_award_matrix,
)
from .embeddings import EmbeddingTable, cosine_cost_matrix
from .errors import ConfigError
from .kg import KnowledgeGraph, kgt_transform
from .metrics import GroundTruth, MetricsReport, evaluate_plan
from .oracle import (
    ACCEPT,
    INITIAL_ENTITY_ALIGN,
    INITIAL_RELATION_ALIGN,
    NONE,
    RETHINK_ENTITY,
    RETHINK_RELATION,
    AnchorOracle,
    OracleQuery,
    top_k_candidates,
)
from .ot import TransportPlan, sinkhorn_plan

log = logging.getLogger(__name__)

# file keys for load_config; "lambda" collides with the keyword, hence "lam"
_CONFIG_KEYS = {
    "iterations": "iterations",
    "sinkhorn_reg": "sinkhorn_reg",
    "epsilon": "epsilon",
    "lambda": "lam",
    "alpha": "alpha",
    "init_threshold": "init_threshold",
    "disable_e_enhancement": "disable_e_enhancement",
    "disable_m_enhancement": "disable_m_enhancement",
    "max_sinkhorn_iters": "max_sinkhorn_iters",
    "sinkhorn_tol": "sinkhorn_tol",
}


@dataclass(frozen=True)
class EremConfig:
    """Run parameters; defaults reproduce the reference setup."""

    iterations: int = 8
    sinkhorn_reg: float = 0.1
    epsilon: float = 1e-5
    lam: float = 1.0
    alpha: float = 2.0
    init_threshold: float = 0.3
    disable_e_enhancement: bool = False
    disable_m_enhancement: bool = False
    max_sinkhorn_iters: int = 1000
    sinkhorn_tol: float = 1e-9

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        for key, value in (
            ("sinkhorn_reg", self.sinkhorn_reg),
            ("epsilon", self.epsilon),
            ("alpha", self.alpha),
            ("init_threshold", self.init_threshold),
            ("sinkhorn_tol", self.sinkhorn_tol),
        ):
            if value <= 0:
                raise ConfigError(f"{key} must be positive, got {value}")
        if not 0 <= self.lam <= 1:
            raise ConfigError(f"lambda must be within [0, 1], got {self.lam}")
        if self.alpha < 1:
            raise ConfigError(f"alpha must be >= 1, got {self.alpha}")
        if self.max_sinkhorn_iters < 1:
            raise ConfigError("max_sinkhorn_iters must be >= 1")

    def to_dict(self) -> dict:
        out = {key: getattr(self, attr) for key, attr in _CONFIG_KEYS.items()}
        return out


_INT_KEYS = {"iterations", "max_sinkhorn_iters"}
_BOOL_KEYS = {"disable_e_enhancement", "disable_m_enhancement"}


def load_config(path: str | Path) -> EremConfig:
    """Read ``key=value`` lines; unset keys fall back to the defaults."""
    values: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw_line in enumerate(fh, start=1):
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {line_no}: expected key=value, got {line!r}")
            key, _, raw_value = line.partition("=")
            key = key.strip()
            raw_value = raw_value.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                if key in _BOOL_KEYS:
                    lowered = raw_value.lower()
                    if lowered not in ("true", "false", "1", "0"):
                        raise ValueError
                    values[_CONFIG_KEYS[key]] = lowered in ("true", "1")
                elif key in _INT_KEYS:
                    values[_CONFIG_KEYS[key]] = int(raw_value)
                else:
                    values[_CONFIG_KEYS[key]] = float(raw_value)
            except ValueError:
                raise ConfigError(f"bad value {raw_value!r} for key {key!r}") from None
    return EremConfig(**values)


@dataclass(frozen=True)
class GraphBundle:
    """One graph together with its entity and relation embeddings."""

    graph: KnowledgeGraph
    entity_embeddings: EmbeddingTable
    relation_embeddings: EmbeddingTable

    def __post_init__(self):
        if self.entity_embeddings.count != self.graph.num_entities:
            raise ValueError(
                f"entity embedding rows ({self.entity_embeddings.count}) != "
                f"graph entities ({self.graph.num_entities})"
            )
        if self.relation_embeddings.count != self.graph.num_relations:
            raise ValueError(
                f"relation embedding rows ({self.relation_embeddings.count}) != "
                f"graph relations ({self.graph.num_relations})"
            )


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    entity_anchor_count: int
    relation_anchor_count: int
    hard_entity_count: int
    hard_relation_count: int
    entity_objective: float
    relation_objective: float
    total_objective: float
    entity_metrics: MetricsReport | None = None
    relation_metrics: MetricsReport | None = None


@dataclass(frozen=True)
class AlignmentResult:
    entity_anchors: AnchorSet
    relation_anchors: AnchorSet
    entity_plan: TransportPlan
    relation_plan: TransportPlan
    entity_cost: AssembledCost
    relation_cost: AssembledCost
    trace: tuple[IterationRecord, ...] = field(repr=False)


def anchor_objective(plan: TransportPlan, anchors: AnchorSet, lam: float) -> float:
    """Negative log-likelihood of the anchors under a transport plan.

    Hard-tier pairs contribute a second term weighted by ``lam``.  A zero
    plan entry at an anchored pair makes the objective infinite; the
    offending pairs are logged rather than raised.
    """
    entries = plan.entries
    offending = [(i, j) for i, j in anchors.pairs() if entries[i, j] <= 0.0]
    if offending:
        log.warning("zero transport mass at anchored pairs %s; objective is infinite", offending)
        return math.inf
    total = -sum(math.log(entries[i, j]) for i, j in anchors.pairs())
    total -= lam * sum(math.log(entries[i, j]) for i, j in anchors.hard_pairs())
    return total


def _inject_oracle_answers(
    anchors: AnchorSet,
    oracle: AnchorOracle,
    cost_entries,
    raw_src_ids,
    raw_tgt_ids,
    src_names,
    tgt_names,
    initial_step: str,
    rethink_step: str,
    k: int = 10,
) -> AnchorSet:
    """Ask the oracle about every source; accepted answers become hard anchors.

    Existing anchors always win: a suggestion that contradicts the
    current one-to-one mapping is dropped with a warning.
    """
    tgt_index = {str(raw): idx for idx, raw in enumerate(raw_tgt_ids)}
    m = cost_entries.shape[0]
    for i in range(m):
        current = anchors.partner_of_source(i)
        ranked = top_k_candidates(cost_entries[i], k=min(k, cost_entries.shape[1]))
        if current is None:
            step = initial_step
            candidate_idx = ranked
            counterpart = ""
        else:
            step = rethink_step
            candidate_idx = [j for j in ranked if j != current]
            counterpart = tgt_names[current]
        if not candidate_idx:
            continue
        query = OracleQuery(
            step=step,
            subject_id=str(raw_src_ids[i]),
            subject_name=src_names[i],
            candidates=tuple((str(raw_tgt_ids[j]), tgt_names[j]) for j in candidate_idx),
            counterpart_name=counterpart,
        )
        reply = oracle.answer(query)
        if reply.verdict == NONE:
            continue
        if reply.verdict == ACCEPT:
            if current is None:
                log.warning("oracle accepted unanchored source %s; ignoring", query.subject_id)
            else:
                anchors = anchors.with_hard([(i, current)])
            continue
        # replace
        j = tgt_index.get(reply.target_id or "")
        if j is None:
            log.warning("oracle named unknown target id %r; ignoring", reply.target_id)
            continue
        if current is not None:
            if current == j:
                anchors = anchors.with_hard([(i, j)])
            else:
                log.warning(
                    "oracle suggestion (%s -> %s) conflicts with existing anchor; keeping the anchor",
                    query.subject_id, reply.target_id,
                )
            continue
        if anchors.partner_of_target(j) is not None:
            log.warning(
                "oracle suggestion (%s -> %s) conflicts with an anchored target; ignoring",
                query.subject_id, reply.target_id,
            )
            continue
        anchors = anchors.with_pair(i, j, HARD)
    return anchors


def run_alignment(
    cfg: EremConfig,
    source: GraphBundle,
    target: GraphBundle,
    oracle: AnchorOracle | None = None,
    entity_truth: GroundTruth | None = None,
    relation_truth: GroundTruth | None = None,
) -> AlignmentResult:
    """Run the full alternating loop and return plans, anchors, and a trace."""
    g, g2 = source.graph, target.graph
    c_ent = cosine_cost_matrix(source.entity_embeddings, target.entity_embeddings)
    c_rel = cosine_cost_matrix(source.relation_embeddings, target.relation_embeddings)
    ye = init_anchor_set(c_ent, cfg.init_threshold)
    yr = init_anchor_set(c_rel, cfg.init_threshold)
    rkg, rkg2 = kgt_transform(g), kgt_transform(g2)
    log.info("initial anchors: %d entity, %d relation", len(ye), len(yr))

    trace: list[IterationRecord] = []
    entity_plan = relation_plan = None
    entity_cost = relation_cost = None
    for iteration in range(1, cfg.iterations + 1):
        # entity matching, boosted by relation anchors
        if not cfg.disable_e_enhancement:
            ye = derive_hard_entity_anchors(g, g2, ye, yr)
        if oracle is not None:
            ye = _inject_oracle_answers(
                ye, oracle, c_ent.entries,
                g.entity_ids, g2.entity_ids, g.entity_names, g2.entity_names,
                INITIAL_ENTITY_ALIGN, RETHINK_ENTITY,
            )
        s_stru, s_rel = entity_award_matrices(g, g2, ye, yr, cfg.alpha)
        entity_cost = assemble_entity_cost(c_ent, s_stru, s_rel)
        entity_plan = sinkhorn_plan(
            entity_cost, cfg.sinkhorn_reg, cfg.max_sinkhorn_iters, cfg.sinkhorn_tol
        )
        ye = promote_anchors(entity_plan, ye, cfg.epsilon)
        entity_objective = anchor_objective(entity_plan, ye, cfg.lam)
        entity_metrics = (
            evaluate_plan(entity_plan, entity_cost, entity_truth, "EA")
            if entity_truth is not None
            else None
        )

        # relation matching, boosted by hard entity anchors
        if not cfg.disable_m_enhancement:
            yr = derive_hard_relation_anchors(g, g2, ye, yr)
        if oracle is not None:
            yr = _inject_oracle_answers(
                yr, oracle, c_rel.entries,
                g.relation_ids, g2.relation_ids, g.relation_names, g2.relation_names,
                INITIAL_RELATION_ALIGN, RETHINK_RELATION,
            )
        s_stru_rel = relation_award_matrix(rkg, rkg2, yr, cfg.alpha)
        relation_cost = assemble_relation_cost(c_rel, s_stru_rel)
        relation_plan = sinkhorn_plan(
            relation_cost, cfg.sinkhorn_reg, cfg.max_sinkhorn_iters, cfg.sinkhorn_tol
        )
        yr = promote_anchors(relation_plan, yr, cfg.epsilon)
        relation_objective = anchor_objective(relation_plan, yr, cfg.lam)
        relation_metrics = (
            evaluate_plan(relation_plan, relation_cost, relation_truth, "RA")
            if relation_truth is not None
            else None
        )

        trace.append(
            IterationRecord(
                iteration=iteration,
                entity_anchor_count=len(ye),
                relation_anchor_count=len(yr),
                hard_entity_count=len(ye.hard_pairs()),
                hard_relation_count=len(yr.hard_pairs()),
                entity_objective=entity_objective,
                relation_objective=relation_objective,
                total_objective=entity_objective + relation_objective,
                entity_metrics=entity_metrics,
                relation_metrics=relation_metrics,
            )
        )
        log.info(
            "iteration %d: %d entity anchors (%d hard), %d relation anchors (%d hard)",
            iteration, len(ye), len(ye.hard_pairs()), len(yr), len(yr.hard_pairs()),
        )

    return AlignmentResult(
        entity_anchors=ye,
        relation_anchors=yr,
        entity_plan=entity_plan,
        relation_plan=relation_plan,
        entity_cost=entity_cost,
        relation_cost=relation_cost,
        trace=tuple(trace),
    )


def with_ablation(cfg: EremConfig, disable_e: bool = False, disable_m: bool = False) -> EremConfig:
    return replace(
        cfg,
        disable_e_enhancement=cfg.disable_e_enhancement or disable_e,
        disable_m_enhancement=cfg.disable_m_enhancement or disable_m,
    )
