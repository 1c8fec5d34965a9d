"""Ground-truthed synthetic graph pairs: a seeded source graph and a
relabeled twin with optional triple dropout and embedding noise.

The twin's entity/relation indices are random bijections of the source's
(those bijections are the ground truth), and its embeddings are the
source embeddings under the same bijection plus gaussian noise.  All
randomness comes from Philox streams keyed by the spec seed, so a spec
regenerates byte-identical pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .em import GraphBundle
from .embeddings import synth_embedding_table
from .kg import KnowledgeGraph
from .metrics import GroundTruth


@dataclass(frozen=True)
class SynthSpec:
    entity_count: int
    relation_count: int
    triple_count: int
    seed: int = 0
    embedding_dim: int = 32
    embedding_noise_sigma: float = 0.0
    triple_dropout: float = 0.0
    name_scheme: str = "{kind}{index}"

    def __post_init__(self):
        if self.entity_count < 1:
            raise ValueError(f"entity_count must be >= 1, got {self.entity_count}")
        if self.relation_count < 1:
            raise ValueError(f"relation_count must be >= 1, got {self.relation_count}")
        if self.triple_count < 0:
            raise ValueError(f"triple_count must be >= 0, got {self.triple_count}")
        if self.triple_count > self.entity_count**2:
            raise ValueError(
                f"triple_count {self.triple_count} exceeds entity_count^2 = {self.entity_count**2}"
            )
        if not 0 <= self.triple_dropout < 1:
            raise ValueError(f"triple_dropout must be in [0, 1), got {self.triple_dropout}")
        if self.embedding_noise_sigma < 0:
            raise ValueError("embedding_noise_sigma must be non-negative")
        if self.embedding_dim < 2:
            raise ValueError(f"embedding_dim must be >= 2, got {self.embedding_dim}")


@dataclass(frozen=True)
class SynthPair:
    source: GraphBundle
    target: GraphBundle
    entity_truth: GroundTruth
    relation_truth: GroundTruth


def _sample_triples(rng: np.random.Generator, spec: SynthSpec) -> list[tuple[int, int, int]]:
    seen: set[tuple[int, int, int]] = set()
    triples: list[tuple[int, int, int]] = []
    attempts = 0
    limit = 50 * spec.triple_count + 1000
    while len(triples) < spec.triple_count and attempts < limit:
        attempts += 1
        h = int(rng.integers(spec.entity_count))
        t = int(rng.integers(spec.entity_count))
        r = int(rng.integers(spec.relation_count))
        triple = (h, r, t)
        if triple not in seen:
            seen.add(triple)
            triples.append(triple)
    if len(triples) < spec.triple_count:
        # dense regime: fill deterministically from the lexicographic grid
        for h in range(spec.entity_count):
            for r in range(spec.relation_count):
                for t in range(spec.entity_count):
                    if len(triples) == spec.triple_count:
                        return triples
                    triple = (h, r, t)
                    if triple not in seen:
                        seen.add(triple)
                        triples.append(triple)
    return triples


def generate_pair(spec: SynthSpec) -> SynthPair:
    """Sample a source graph and build its ground-truth-aligned twin."""
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(spec.seed, spawn_key=(7,)))
    )
    triples = _sample_triples(rng, spec)

    ent_perm = rng.permutation(spec.entity_count)
    rel_perm = rng.permutation(spec.relation_count)
    # twin raw ids live above the source ids, mirroring the usual two-sided layout
    ent_offset, rel_offset = spec.entity_count, spec.relation_count
    twin_triples = [
        (ent_offset + int(ent_perm[h]), rel_offset + int(rel_perm[r]), ent_offset + int(ent_perm[t]))
        for h, r, t in triples
    ]
    if spec.triple_dropout > 0 and twin_triples:
        keep = rng.random(len(twin_triples)) >= spec.triple_dropout
        twin_triples = [t for t, k in zip(twin_triples, keep) if k]

    def names(kind: str, count: int, suffix: str) -> list[str]:
        return [spec.name_scheme.format(kind=kind, index=i) + suffix for i in range(count)]

    g = KnowledgeGraph.from_raw(
        list(zip(range(spec.entity_count), names("ent", spec.entity_count, ""))),
        list(zip(range(spec.relation_count), names("rel", spec.relation_count, ""))),
        triples,
    )
    g2 = KnowledgeGraph.from_raw(
        list(
            zip(
                range(ent_offset, 2 * ent_offset),
                names("ent", spec.entity_count, "'"),
            )
        ),
        list(
            zip(
                range(rel_offset, 2 * rel_offset),
                names("rel", spec.relation_count, "'"),
            )
        ),
        twin_triples,
    )

    inv_ent = np.argsort(ent_perm)  # twin row i aligns with source row inv_ent[i]
    inv_rel = np.argsort(rel_perm)
    ent_base = synth_embedding_table(g, "entity", spec.seed, spec.embedding_dim)
    rel_base = synth_embedding_table(g, "relation", spec.seed, spec.embedding_dim)
    ent_twin = synth_embedding_table(
        g2, "entity", spec.seed, spec.embedding_dim, spec.embedding_noise_sigma,
        twin_of=(ent_base, inv_ent),
    )
    rel_twin = synth_embedding_table(
        g2, "relation", spec.seed, spec.embedding_dim, spec.embedding_noise_sigma,
        twin_of=(rel_base, inv_rel),
    )

    return SynthPair(
        source=GraphBundle(g, ent_base, rel_base),
        target=GraphBundle(g2, ent_twin, rel_twin),
        entity_truth=GroundTruth(tuple((i, int(ent_perm[i])) for i in range(spec.entity_count))),
        relation_truth=GroundTruth(tuple((r, int(rel_perm[r])) for r in range(spec.relation_count))),
    )
