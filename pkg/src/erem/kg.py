"""Knowledge-graph containers, the id-map/triple parser, and the
relation-graph transform.

A :class:`KnowledgeGraph` is immutable after construction: entities and
relations live in separate dense index spaces (index = position in the
id map), and the adjacency lists mirror the triple list exactly.  The
relation graph produced by :func:`kgt_transform` re-centers the triples
on relations, so 1-hop queries over relations cost no more than the
answer they return.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .errors import ParseError, ReferentialError

OUTGOING = "outgoing"
INCOMING = "incoming"


@dataclass(frozen=True)
class KnowledgeGraph:
    """Entities, relations, and directed triples with both-direction adjacency.

    ``entity_ids``/``relation_ids`` keep the raw file identifiers; every
    other field works in dense indices (the position within those tuples).
    """

    entity_ids: tuple[int, ...]
    relation_ids: tuple[int, ...]
    entity_names: tuple[str, ...]
    relation_names: tuple[str, ...]
    triples: tuple[tuple[int, int, int], ...]
    out_adj: tuple[tuple[tuple[int, int], ...], ...]
    in_adj: tuple[tuple[tuple[int, int], ...], ...]
    entity_index: dict[int, int] = field(repr=False)
    relation_index: dict[int, int] = field(repr=False)
    triple_set: frozenset[tuple[int, int, int]] = field(repr=False)

    @property
    def num_entities(self) -> int:
        return len(self.entity_ids)

    @property
    def num_relations(self) -> int:
        return len(self.relation_ids)

    @classmethod
    def from_raw(
        cls,
        entities: Sequence[tuple[int, str]],
        relations: Sequence[tuple[int, str]],
        raw_triples: Iterable[tuple[int, int, int]],
    ) -> "KnowledgeGraph":
        """Build an indexed graph from (raw id, name) rows and raw-id triples.

        Duplicate triples are collapsed; a triple naming an undeclared id
        raises :class:`ReferentialError`.
        """
        entity_ids = tuple(i for i, _ in entities)
        relation_ids = tuple(i for i, _ in relations)
        entity_index = {raw: k for k, raw in enumerate(entity_ids)}
        relation_index = {raw: k for k, raw in enumerate(relation_ids)}
        if len(entity_index) != len(entity_ids):
            raise ReferentialError("duplicate entity id in id map")
        if len(relation_index) != len(relation_ids):
            raise ReferentialError("duplicate relation id in id map")

        seen: set[tuple[int, int, int]] = set()
        triples: list[tuple[int, int, int]] = []
        for h, r, t in raw_triples:
            for raw, index, what in ((h, entity_index, "head entity"), (t, entity_index, "tail entity")):
                if raw not in index:
                    raise ReferentialError(f"triple references unknown {what} id {raw}")
            if r not in relation_index:
                raise ReferentialError(f"triple references unknown relation id {r}")
            dense = (entity_index[h], relation_index[r], entity_index[t])
            if dense not in seen:
                seen.add(dense)
                triples.append(dense)

        out_lists: list[list[tuple[int, int]]] = [[] for _ in entity_ids]
        in_lists: list[list[tuple[int, int]]] = [[] for _ in entity_ids]
        for h, r, t in triples:
            out_lists[h].append((r, t))
            in_lists[t].append((r, h))
        return cls(
            entity_ids=entity_ids,
            relation_ids=relation_ids,
            entity_names=tuple(n for _, n in entities),
            relation_names=tuple(n for _, n in relations),
            triples=tuple(triples),
            out_adj=tuple(tuple(lst) for lst in out_lists),
            in_adj=tuple(tuple(lst) for lst in in_lists),
            entity_index=entity_index,
            relation_index=relation_index,
            triple_set=frozenset(triples),
        )

    def one_hop_entity_neighbors(self, e: int) -> list[tuple[int, int, str]]:
        """All ``(relation, neighbor, orientation)`` edges touching entity ``e``.

        Orientation is :data:`OUTGOING` for triples with ``e`` as head and
        :data:`INCOMING` for triples with ``e`` as tail; the result is
        sorted by (relation, neighbor, orientation).
        """
        if not 0 <= e < self.num_entities:
            raise ValueError(f"entity index {e} out of range [0, {self.num_entities})")
        edges = [(r, t, OUTGOING) for r, t in self.out_adj[e]]
        edges += [(r, h, INCOMING) for r, h in self.in_adj[e]]
        edges.sort()
        return edges


@dataclass(frozen=True)
class RelationGraph:
    """Relations linked whenever they touch a common entity in the source graph.

    ``rel_triples`` holds one canonical ``(r_a, entity, r_b)`` record per
    co-incidence (``r_a <= r_b``); ``rel_adj`` drops the ``r_a == r_b``
    self-links and is symmetric by construction.
    """

    num_relations: int
    rel_triples: tuple[tuple[int, int, int], ...]
    rel_adj: tuple[frozenset[int], ...]

    def one_hop_relation_neighbors(self, r: int) -> frozenset[int]:
        if not 0 <= r < self.num_relations:
            raise ValueError(f"relation index {r} out of range [0, {self.num_relations})")
        return self.rel_adj[r]


def _parse_id_map(stream: IO[str], label: str) -> list[tuple[int, str]]:
    rows: list[tuple[int, str]] = []
    for line_no, raw_line in enumerate(stream, start=1):
        line = raw_line.rstrip("\n").rstrip("\r")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(label, line_no, f"expected 2 tab-separated columns, got {len(cols)}")
        try:
            ident = int(cols[0])
        except ValueError:
            raise ParseError(label, line_no, f"id {cols[0]!r} is not an integer") from None
        if ident < 0:
            raise ParseError(label, line_no, f"id {ident} is negative")
        rows.append((ident, cols[1]))
    return rows


def parse_graph(
    ent_ids: IO[str],
    rel_ids: IO[str],
    triples: IO[str],
    *,
    label: str = "graph",
) -> KnowledgeGraph:
    """Parse one graph from id-map streams and a triple stream.

    Id maps are ``id<TAB>name`` lines; triples are
    ``head_id<TAB>rel_id<TAB>tail_id`` lines.  Ids declared in the maps but
    never used by a triple stay in the graph as isolated nodes.
    """
    entities = _parse_id_map(ent_ids, f"{label}/ent_ids")
    relations = _parse_id_map(rel_ids, f"{label}/rel_ids")

    raw_triples: list[tuple[int, int, int]] = []
    source = f"{label}/triples"
    for line_no, raw_line in enumerate(triples, start=1):
        line = raw_line.rstrip("\n").rstrip("\r")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(source, line_no, f"expected 3 tab-separated columns, got {len(cols)}")
        try:
            h, r, t = (int(c) for c in cols)
        except ValueError:
            raise ParseError(source, line_no, "non-integer id") from None
        raw_triples.append((h, r, t))
    return KnowledgeGraph.from_raw(entities, relations, raw_triples)


def kgt_transform(g: KnowledgeGraph) -> RelationGraph:
    """Re-center ``(entity, relation, entity)`` triples on their relations.

    For every entity, each unordered pair of distinct incident triples
    contributes one ``(r_a, entity, r_b)`` record.  Edge direction is
    ignored: sharing any incident entity makes two relations adjacent.
    """
    incident: list[Counter[int]] = [Counter() for _ in range(g.num_entities)]
    for h, r, t in g.triples:
        incident[h][r] += 1
        if t != h:
            incident[t][r] += 1

    rel_triples: set[tuple[int, int, int]] = set()
    for e, counts in enumerate(incident):
        rels = sorted(counts)
        for a_pos, ra in enumerate(rels):
            if counts[ra] >= 2:
                rel_triples.add((ra, e, ra))
            for rb in rels[a_pos + 1 :]:
                rel_triples.add((ra, e, rb))

    adj: list[set[int]] = [set() for _ in range(g.num_relations)]
    for ra, _, rb in rel_triples:
        if ra != rb:
            adj[ra].add(rb)
            adj[rb].add(ra)
    return RelationGraph(
        num_relations=g.num_relations,
        rel_triples=tuple(sorted(rel_triples)),
        rel_adj=tuple(frozenset(s) for s in adj),
    )
