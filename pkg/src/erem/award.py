"""Structural award matrices and cost assembly.

Awards credit anchored pairs whose neighborhoods agree across the two
graphs.  Each distinct anchored neighbor pair counts once per cell: 1
for normal evidence, ``alpha`` when both the center pair and the
neighbor pair are hard (the hard case replaces the normal one, it does
not stack).  Before entering a cost, each award matrix is normalized by
its global maximum and flipped to ``1 - award``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anchors import AnchorSet
from .embeddings import CostMatrix, _freeze
from .errors import DataError
from .kg import KnowledgeGraph, RelationGraph


@dataclass(frozen=True)
class AwardMatrix:
    """Non-negative evidence counters, same shape as the matching cost."""

    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2:
            raise ValueError(f"award matrix must be 2-D, got shape {e.shape}")
        if not np.isfinite(e).all() or (e < 0).any():
            raise DataError("award entries must be finite and non-negative")
        object.__setattr__(self, "entries", _freeze(e))


@dataclass(frozen=True)
class AssembledCost:
    """A final transport cost plus the labels of its components."""

    entries: np.ndarray
    provenance: tuple[str, ...]

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2:
            raise ValueError(f"assembled cost must be 2-D, got shape {e.shape}")
        if not np.isfinite(e).all():
            raise DataError("non-finite entry in assembled cost")
        object.__setattr__(self, "entries", _freeze(e))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _oriented_neighbor_map(
    g: KnowledgeGraph, e: int
) -> dict[int, tuple[set[int], set[int]]]:
    """neighbor -> (relations on outgoing edges, relations on incoming edges)."""
    nbrs: dict[int, tuple[set[int], set[int]]] = {}
    for r, t in g.out_adj[e]:
        nbrs.setdefault(t, (set(), set()))[0].add(r)
    for r, h in g.in_adj[e]:
        nbrs.setdefault(h, (set(), set()))[1].add(r)
    return nbrs


def entity_award_matrices(
    g: KnowledgeGraph,
    g2: KnowledgeGraph,
    ye: AnchorSet,
    yr: AnchorSet,
    alpha: float = 2.0,
) -> tuple[AwardMatrix, AwardMatrix]:
    """Structure and relation-aware awards for every anchored entity pair.

    For a center pair (i, j) and an anchored neighbor pair (x, z) with x
    one hop from i and z one hop from j, the structure award gains 1 (or
    ``alpha`` when both pairs are hard).  The relation-aware award gains
    the same amount when, additionally, some anchored relation pair
    labels the connecting edges with matching direction on both sides.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    m, n = g.num_entities, g2.num_entities
    for i, j in ye.pairs():
        if not (0 <= i < m and 0 <= j < n):
            raise ValueError(f"entity anchor {(i, j)} out of range ({m}x{n})")
    s_stru = np.zeros((m, n))
    s_rel = np.zeros((m, n))

    for i, j in ye.pairs():
        nbrs_j = _oriented_neighbor_map(g2, j)
        if not nbrs_j:
            continue
        center_hard = ye.is_hard((i, j))
        for x, (out_rels, in_rels) in _oriented_neighbor_map(g, i).items():
            z = ye.partner_of_source(x)
            if z is None or z not in nbrs_j:
                continue
            weight = alpha if center_hard and ye.is_hard((x, z)) else 1.0
            s_stru[i, j] += weight
            z_out, z_in = nbrs_j[z]
            relation_hit = any(
                yr.partner_of_source(r) in z_out for r in out_rels
            ) or any(yr.partner_of_source(r) in z_in for r in in_rels)
            if relation_hit:
                s_rel[i, j] += weight
    return AwardMatrix(s_stru), AwardMatrix(s_rel)


def relation_award_matrix(
    rkg: RelationGraph,
    rkg2: RelationGraph,
    yr: AnchorSet,
    alpha: float = 2.0,
) -> AwardMatrix:
    """Structure award over the relation graphs of both sides."""
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    m, n = rkg.num_relations, rkg2.num_relations
    for i, j in yr.pairs():
        if not (0 <= i < m and 0 <= j < n):
            raise ValueError(f"relation anchor {(i, j)} out of range ({m}x{n})")
    award = np.zeros((m, n))
    for i, j in yr.pairs():
        adj_j = rkg2.rel_adj[j]
        if not adj_j:
            continue
        center_hard = yr.is_hard((i, j))
        for x in rkg.rel_adj[i]:
            z = yr.partner_of_source(x)
            if z is None or z not in adj_j:
                continue
            award[i, j] += alpha if center_hard and yr.is_hard((x, z)) else 1.0
    return AwardMatrix(award)


def _award_cost(award: AwardMatrix) -> np.ndarray:
    entries = award.entries
    peak = entries.max() if entries.size else 0.0
    normalized = entries / peak if peak > 0 else entries
    return 1.0 - normalized


def assemble_entity_cost(
    c_ent: CostMatrix, s_stru: AwardMatrix, s_rel: AwardMatrix
) -> AssembledCost:
    """Entity transport cost: embedding cost plus two flipped awards."""
    if c_ent.shape != s_stru.entries.shape or c_ent.shape != s_rel.entries.shape:
        raise ValueError(
            f"shape mismatch: cost {c_ent.shape}, awards "
            f"{s_stru.entries.shape} / {s_rel.entries.shape}"
        )
    entries = c_ent.entries + _award_cost(s_stru) + _award_cost(s_rel)
    return AssembledCost(entries, ("embedding_cosine", "structure_award", "relation_award"))


def assemble_relation_cost(
    c_rel_emb: CostMatrix, s_stru_rel: AwardMatrix
) -> AssembledCost:
    """Relation transport cost: embedding cost plus one flipped award."""
    if c_rel_emb.shape != s_stru_rel.entries.shape:
        raise ValueError(
            f"shape mismatch: cost {c_rel_emb.shape}, award {s_stru_rel.entries.shape}"
        )
    entries = c_rel_emb.entries + _award_cost(s_stru_rel)
    return AssembledCost(entries, ("embedding_cosine", "structure_award"))
