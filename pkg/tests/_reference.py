"""Independent brute-force reference implementations used as test oracles.

Everything here favors obviousness over speed: exhaustive scans over the
triple lists, pairwise incidence checks, and factorial enumeration.  The
production code must agree with these on small random instances.
"""

from __future__ import annotations

import itertools

import numpy as np

from erem.anchors import AnchorSet
from erem.kg import KnowledgeGraph


def random_graph(rng: np.random.Generator, n_entities: int, n_relations: int, n_triples: int) -> KnowledgeGraph:
    triples = set()
    for _ in range(n_triples):
        triples.add(
            (
                int(rng.integers(n_entities)),
                int(rng.integers(n_relations)),
                int(rng.integers(n_entities)),
            )
        )
    return KnowledgeGraph.from_raw(
        [(i, f"e{i}") for i in range(n_entities)],
        [(r, f"r{r}") for r in range(n_relations)],
        sorted(triples),
    )


def random_anchor_set(rng: np.random.Generator, m: int, n: int, density: float, hard_share: float = 0.0) -> AnchorSet:
    size = min(m, n)
    count = int(density * size)
    sources = rng.permutation(m)[:count]
    targets = rng.permutation(n)[:count]
    pairs = list(zip(sources.tolist(), targets.tolist()))
    n_hard = int(hard_share * len(pairs))
    return AnchorSet(pairs, pairs[:n_hard])


def entity_neighbors_by_scan(g: KnowledgeGraph, e: int) -> list[tuple[int, int, str]]:
    out = []
    for h, r, t in g.triples:
        if h == e:
            out.append((r, t, "outgoing"))
        if t == e:
            out.append((r, h, "incoming"))
    return sorted(out)


def relation_adjacency_by_scan(g: KnowledgeGraph) -> list[set[int]]:
    """O(|R|^2) pairwise co-incidence over entities."""
    incident = [set() for _ in range(g.num_relations)]
    for h, r, t in g.triples:
        incident[r].add(h)
        incident[r].add(t)
    adj = [set() for _ in range(g.num_relations)]
    for ra in range(g.num_relations):
        for rb in range(g.num_relations):
            if ra != rb and incident[ra] & incident[rb]:
                adj[ra].add(rb)
    return adj


def rel_triples_by_scan(g: KnowledgeGraph) -> set[tuple[int, int, int]]:
    expected = set()
    for (i1, (h1, r1, t1)), (i2, (h2, r2, t2)) in itertools.combinations(
        enumerate(g.triples), 2
    ):
        shared = {h1, t1} & {h2, t2}
        for e in shared:
            expected.add((min(r1, r2), e, max(r1, r2)))
    return expected


def hard_entity_pairs_by_scan(
    g: KnowledgeGraph, g2: KnowledgeGraph, ye: AnchorSet, yr: AnchorSet
) -> set[tuple[int, int]]:
    hard = set(ye.hard_pairs())
    for (ei, ei2) in ye.pairs():
        for (ej, ej2) in ye.pairs():
            for (r, r2) in yr.pairs():
                if (ei, r, ej) in g.triple_set and (ei2, r2, ej2) in g2.triple_set:
                    hard.add((ei, ei2))
                    hard.add((ej, ej2))
    return hard


def hard_relation_pairs_by_scan(
    g: KnowledgeGraph, g2: KnowledgeGraph, ye: AnchorSet, yr: AnchorSet
) -> set[tuple[int, int]]:
    hard = set(yr.hard_pairs())
    hard_entities = ye.hard_pairs()
    for (ei, ei2) in hard_entities:
        for (ej, ej2) in hard_entities:
            for (r, r2) in yr.pairs():
                if (ei, r, ej) in g.triple_set and (ei2, r2, ej2) in g2.triple_set:
                    hard.add((r, r2))
    return hard


def entity_awards_by_enumeration(
    g: KnowledgeGraph, g2: KnowledgeGraph, ye: AnchorSet, yr: AnchorSet, alpha: float
) -> tuple[np.ndarray, np.ndarray]:
    s_stru = np.zeros((g.num_entities, g2.num_entities))
    s_rel = np.zeros((g.num_entities, g2.num_entities))
    for (i, j) in ye.pairs():
        hop_i = {x for _, x, _ in entity_neighbors_by_scan(g, i)}
        hop_j = {z for _, z, _ in entity_neighbors_by_scan(g2, j)}
        for (x, z) in ye.pairs():
            if x not in hop_i or z not in hop_j:
                continue
            weight = alpha if ye.is_hard((i, j)) and ye.is_hard((x, z)) else 1.0
            s_stru[i, j] += weight
            connected = False
            for (r, r2) in yr.pairs():
                if (i, r, x) in g.triple_set and (j, r2, z) in g2.triple_set:
                    connected = True
                if (x, r, i) in g.triple_set and (z, r2, j) in g2.triple_set:
                    connected = True
            if connected:
                s_rel[i, j] += weight
    return s_stru, s_rel


def relation_awards_by_enumeration(
    adj, adj2, yr: AnchorSet, alpha: float, m: int, n: int
) -> np.ndarray:
    award = np.zeros((m, n))
    for (i, j) in yr.pairs():
        for (x, z) in yr.pairs():
            if x in adj[i] and z in adj2[j]:
                award[i, j] += alpha if yr.is_hard((i, j)) and yr.is_hard((x, z)) else 1.0
    return award


def matching_by_permutations(cost: np.ndarray) -> tuple[float, frozenset[tuple[int, int]]]:
    m, n = cost.shape
    assert m <= 8 and n <= 8, "factorial enumeration only"
    best_value, best_pairs = None, None
    if m <= n:
        for combo in itertools.permutations(range(n), m):
            value = sum(cost[i, j] for i, j in enumerate(combo))
            if best_value is None or value < best_value:
                best_value = value
                best_pairs = frozenset(enumerate(combo))
    else:
        for combo in itertools.permutations(range(m), n):
            value = sum(cost[i, j] for j, i in enumerate(combo))
            if best_value is None or value < best_value:
                best_value = value
                best_pairs = frozenset((i, j) for j, i in enumerate(combo))
    return best_value, best_pairs
