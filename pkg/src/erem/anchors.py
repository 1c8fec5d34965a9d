"""Anchor sets: one-to-one partial matchings with a normal/hard tier.

Anchors only ever accumulate.  Hard tier marks pairs whose alignment is
additionally confirmed by cross-graph triple agreement; hard pairs are
always a subset of the full pair set.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from .kg import KnowledgeGraph

NORMAL = "normal"
HARD = "hard"


class AnchorSet:
    """An injective partial mapping between two index spaces, with tiers."""

    __slots__ = ("_by_src", "_by_tgt", "_hard")

    def __init__(
        self,
        pairs: Iterable[tuple[int, int]] = (),
        hard: Iterable[tuple[int, int]] = (),
    ):
        self._by_src: dict[int, int] = {}
        self._by_tgt: dict[int, int] = {}
        for i, j in pairs:
            if i in self._by_src and self._by_src[i] != j:
                raise ValueError(f"source {i} anchored twice")
            if j in self._by_tgt and self._by_tgt[j] != i:
                raise ValueError(f"target {j} anchored twice")
            self._by_src[i] = j
            self._by_tgt[j] = i
        self._hard: frozenset[tuple[int, int]] = frozenset(hard)
        for pair in self._hard:
            if self._by_src.get(pair[0]) != pair[1]:
                raise ValueError(f"hard pair {pair} is not in the pair set")

    def __len__(self) -> int:
        return len(self._by_src)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return self._by_src.get(pair[0]) == pair[1]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._by_src.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnchorSet):
            return NotImplemented
        return self._by_src == other._by_src and self._hard == other._hard

    def __repr__(self) -> str:
        return f"AnchorSet({len(self)} pairs, {len(self._hard)} hard)"

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._by_src.items())

    def hard_pairs(self) -> frozenset[tuple[int, int]]:
        return self._hard

    def tier(self, pair: tuple[int, int]) -> str:
        if pair not in self:
            raise KeyError(pair)
        return HARD if pair in self._hard else NORMAL

    def partner_of_source(self, i: int) -> int | None:
        return self._by_src.get(i)

    def partner_of_target(self, j: int) -> int | None:
        return self._by_tgt.get(j)

    def is_hard(self, pair: tuple[int, int]) -> bool:
        return pair in self._hard

    def with_pair(self, i: int, j: int, tier: str = NORMAL) -> "AnchorSet":
        """A copy with ``(i, j)`` added (or upgraded to hard)."""
        if tier not in (NORMAL, HARD):
            raise ValueError(f"unknown tier {tier!r}")
        hard = set(self._hard)
        if tier == HARD:
            hard.add((i, j))
        return AnchorSet(list(self._by_src.items()) + [(i, j)], hard)

    def with_hard(self, pairs: Iterable[tuple[int, int]]) -> "AnchorSet":
        """A copy with the given existing pairs upgraded to hard tier."""
        return AnchorSet(self._by_src.items(), self._hard | set(pairs))


def init_anchor_set(cost, threshold: float = 0.3) -> AnchorSet:
    """Seed anchors from a cost matrix.

    A pair (i, j) is a candidate when cost[i, j] is below ``threshold``
    and is the strict minimum of row i.  When several rows claim one
    column, the cheapest row wins (ties to the lowest row index); all
    surviving pairs are normal tier.
    """
    entries = np.asarray(getattr(cost, "entries", cost), dtype=np.float64)
    if entries.ndim != 2:
        raise ValueError(f"cost must be 2-D, got shape {entries.shape}")
    if entries.size == 0:
        return AnchorSet()
    mins = entries.min(axis=1)
    argmins = entries.argmin(axis=1)
    strict = (entries == mins[:, None]).sum(axis=1) == 1
    candidates = [
        (float(mins[i]), int(i), int(argmins[i]))
        for i in np.nonzero(strict & (mins < threshold))[0]
    ]
    candidates.sort()
    taken: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, i, j in candidates:
        if j not in taken:
            taken.add(j)
            pairs.append((i, j))
    return AnchorSet(pairs)


def _check_anchor_ranges(anchors: AnchorSet, m: int, n: int, what: str) -> None:
    for i, j in anchors.pairs():
        if not (0 <= i < m and 0 <= j < n):
            raise ValueError(f"{what} anchor {(i, j)} out of range ({m}x{n})")


def derive_hard_entity_anchors(
    g: KnowledgeGraph,
    g2: KnowledgeGraph,
    ye: AnchorSet,
    yr: AnchorSet,
) -> AnchorSet:
    """Upgrade entity anchors confirmed by an anchored-relation triple match.

    A source triple (e_i, r, e_j) whose head, tail, and relation are all
    anchored, and whose image triple exists in the target graph, makes
    both endpoint anchors hard.  No pairs are added or removed.
    """
    _check_anchor_ranges(ye, g.num_entities, g2.num_entities, "entity")
    _check_anchor_ranges(yr, g.num_relations, g2.num_relations, "relation")
    hard = set(ye.hard_pairs())
    for h, r, t in g.triples:
        h2 = ye.partner_of_source(h)
        t2 = ye.partner_of_source(t)
        r2 = yr.partner_of_source(r)
        if h2 is None or t2 is None or r2 is None:
            continue
        if (h2, r2, t2) in g2.triple_set:
            hard.add((h, h2))
            hard.add((t, t2))
    return ye.with_hard(hard)


def derive_hard_relation_anchors(
    g: KnowledgeGraph,
    g2: KnowledgeGraph,
    ye_hard: AnchorSet,
    yr: AnchorSet,
) -> AnchorSet:
    """Upgrade relation anchors witnessed by a pair of hard entity anchors.

    Only hard-tier entity pairs count as evidence: (r, r') becomes hard
    when some source triple (e_i, r, e_j) with both endpoints hard maps
    onto an existing target triple (e_i', r', e_j').
    """
    _check_anchor_ranges(ye_hard, g.num_entities, g2.num_entities, "entity")
    _check_anchor_ranges(yr, g.num_relations, g2.num_relations, "relation")
    hard_by_src = dict(ye_hard.hard_pairs())
    hard = set(yr.hard_pairs())
    for h, r, t in g.triples:
        r2 = yr.partner_of_source(r)
        if r2 is None:
            continue
        h2 = hard_by_src.get(h)
        t2 = hard_by_src.get(t)
        if h2 is None or t2 is None:
            continue
        if (h2, r2, t2) in g2.triple_set:
            hard.add((r, r2))
    return yr.with_hard(hard)


def promote_anchors(plan, existing: AnchorSet, epsilon: float = 1e-5) -> AnchorSet:
    """Add fresh pairs whose transport mass clears the promotion threshold.

    Row i promotes its argmax column j when plan[i, j] exceeds
    ``1/max(m, n) - epsilon`` and neither i nor j is already anchored.
    Rows are scanned in ascending order, so earlier promotions claim
    their columns first.  Existing pairs are never removed.
    """
    entries = np.asarray(getattr(plan, "entries", plan), dtype=np.float64)
    if entries.ndim != 2:
        raise ValueError(f"plan must be 2-D, got shape {entries.shape}")
    m, n = entries.shape
    threshold = 1.0 / max(m, n) - epsilon
    pairs = dict(existing.pairs())
    taken = {j for _, j in pairs.items()}
    for i in range(m):
        if i in pairs:
            continue
        j = int(entries[i].argmax())
        if entries[i, j] > threshold and j not in taken:
            pairs[i] = j
            taken.add(j)
    return AnchorSet(pairs.items(), existing.hard_pairs())
