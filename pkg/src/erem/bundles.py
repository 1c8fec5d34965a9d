"""On-disk dataset bundles and anchor dumps.

A bundle directory follows the common two-sided layout: ``ent_ids_1``,
``rel_ids_1``, ``triples_1`` for the source graph (and ``_2`` for the
target), EREMEMB1 embedding files, and ``ref_ent_ids``/``ref_rel_ids``
ground-truth pair files.  Anchor dumps are
``src_id<TAB>tgt_id<TAB>{normal|hard}`` lines in raw identifiers.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .anchors import AnchorSet, HARD, NORMAL
from .em import GraphBundle
from .embeddings import load_embedding_table, save_embedding_table
from .errors import FormatError
from .kg import KnowledgeGraph, parse_graph
from .metrics import write_truth_pairs
from .synth import SynthPair

ENT_IDS = ("ent_ids_1", "ent_ids_2")
REL_IDS = ("rel_ids_1", "rel_ids_2")
TRIPLES = ("triples_1", "triples_2")
ENT_EMB = ("ent_emb_1.bin", "ent_emb_2.bin")
REL_EMB = ("rel_emb_1.bin", "rel_emb_2.bin")
REF_ENTITIES = "ref_ent_ids"
REF_RELATIONS = "ref_rel_ids"


def _write_id_map(path: Path, ids, names) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for raw, name in zip(ids, names):
            fh.write(f"{raw}\t{name}\n")


def _write_triples(path: Path, g: KnowledgeGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h, r, t in g.triples:
            fh.write(f"{g.entity_ids[h]}\t{g.relation_ids[r]}\t{g.entity_ids[t]}\n")


def write_bundle(directory: str | Path, pair: SynthPair) -> None:
    """Materialize a synthetic pair as a loadable bundle directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for side, bundle in enumerate((pair.source, pair.target)):
        g = bundle.graph
        _write_id_map(directory / ENT_IDS[side], g.entity_ids, g.entity_names)
        _write_id_map(directory / REL_IDS[side], g.relation_ids, g.relation_names)
        _write_triples(directory / TRIPLES[side], g)
        save_embedding_table(directory / ENT_EMB[side], bundle.entity_embeddings)
        save_embedding_table(directory / REL_EMB[side], bundle.relation_embeddings)
    src_g, tgt_g = pair.source.graph, pair.target.graph
    write_truth_pairs(
        directory / REF_ENTITIES,
        ((src_g.entity_ids[i], tgt_g.entity_ids[j]) for i, j in pair.entity_truth.pairs),
    )
    write_truth_pairs(
        directory / REF_RELATIONS,
        ((src_g.relation_ids[i], tgt_g.relation_ids[j]) for i, j in pair.relation_truth.pairs),
    )


def load_graph(directory: str | Path, side: int) -> KnowledgeGraph:
    directory = Path(directory)
    label = f"{directory.name}/side{side + 1}"
    with open(directory / ENT_IDS[side], encoding="utf-8") as ent, open(
        directory / REL_IDS[side], encoding="utf-8"
    ) as rel, open(directory / TRIPLES[side], encoding="utf-8") as tri:
        return parse_graph(ent, rel, tri, label=label)


def load_graph_bundle(
    directory: str | Path,
    side: int,
    ent_emb_path: str | Path | None = None,
    rel_emb_path: str | Path | None = None,
) -> GraphBundle:
    """Load one side of a bundle; embedding paths default to the bundle files."""
    directory = Path(directory)
    g = load_graph(directory, side)
    ent_path = Path(ent_emb_path) if ent_emb_path else directory / ENT_EMB[side]
    rel_path = Path(rel_emb_path) if rel_emb_path else directory / REL_EMB[side]
    return GraphBundle(
        graph=g,
        entity_embeddings=load_embedding_table(ent_path, g.num_entities),
        relation_embeddings=load_embedding_table(rel_path, g.num_relations),
    )


def write_anchor_dump(
    path: str | Path,
    anchors: AnchorSet,
    src_ids,
    tgt_ids,
) -> None:
    """Dump anchors as raw-id rows, hard tier marked."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j in anchors:
            tier = HARD if anchors.is_hard((i, j)) else NORMAL
            fh.write(f"{src_ids[i]}\t{tgt_ids[j]}\t{tier}\n")


def read_anchor_dump(path: str | Path) -> list[tuple[int, int, str]]:
    """Read anchor dump rows back as (src raw id, tgt raw id, tier)."""
    rows: list[tuple[int, int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw_line in enumerate(fh, start=1):
            line = raw_line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3 or cols[2] not in (NORMAL, HARD):
                raise FormatError(f"{path}: line {line_no}: malformed anchor row")
            try:
                rows.append((int(cols[0]), int(cols[1]), cols[2]))
            except ValueError:
                raise FormatError(f"{path}: line {line_no}: non-integer id") from None
    return rows


def anchors_from_dump(
    rows: Iterable[tuple[int, int, str]],
    src_index: dict[int, int],
    tgt_index: dict[int, int],
) -> AnchorSet:
    """Map raw-id dump rows back into an index-space anchor set."""
    pairs: list[tuple[int, int]] = []
    hard: list[tuple[int, int]] = []
    for raw_src, raw_tgt, tier in rows:
        pair = (src_index[raw_src], tgt_index[raw_tgt])
        pairs.append(pair)
        if tier == HARD:
            hard.append(pair)
    return AnchorSet(pairs, hard)
