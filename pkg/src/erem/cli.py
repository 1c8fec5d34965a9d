"""Command-line entry point: align, eval, synth, export-prompts, inspect."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import shutil
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bundles import (
    ENT_EMB,
    REF_ENTITIES,
    REF_RELATIONS,
    REL_EMB,
    load_graph,
    load_graph_bundle,
    read_anchor_dump,
    write_anchor_dump,
    write_bundle,
)
from .em import EremConfig, load_config, run_alignment, with_ablation
from .embeddings import read_matrix, write_matrix
from .errors import EremError
from .kg import kgt_transform
from .metrics import GroundTruth, MetricsReport, evaluate_plan, read_truth_pairs
from .oracle import (
    INITIAL_ENTITY_ALIGN,
    INITIAL_RELATION_ALIGN,
    TASK_DESCRIPTION,
    OracleQuery,
    ReplayOracle,
    top_k_candidates,
    write_prompt_files,
)
from .synth import SynthSpec, generate_pair

log = logging.getLogger(__name__)

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _positive_int(value: str) -> int:
    parsed = int(value)
    if parsed < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return parsed


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _prepare_out_dir(out: Path, force: bool) -> None:
    if out.exists():
        if not force:
            raise EremError(f"output directory {out} exists; pass --force to replace it")
        shutil.rmtree(out)
    out.mkdir(parents=True)


def _id_map_index(path: str | Path) -> dict[int, int]:
    index: dict[int, int] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line:
            index[int(line.split("\t")[0])] = len(index)
    return index


def _truth_lookup(pairs, src_index, tgt_index) -> GroundTruth:
    mapped = []
    for raw_src, raw_tgt in pairs:
        if raw_src not in src_index or raw_tgt not in tgt_index:
            raise EremError(f"truth pair ({raw_src}, {raw_tgt}) references unknown ids")
        mapped.append((src_index[raw_src], tgt_index[raw_tgt]))
    return GroundTruth(tuple(mapped))


def _metrics_json(report: MetricsReport | None, per_iteration: list[dict]) -> dict | None:
    if report is None:
        return None
    doc = report.to_dict()
    doc["per_iteration"] = per_iteration
    return doc


def _ablation_label(cfg: EremConfig) -> str:
    label = ""
    if cfg.disable_e_enhancement:
        label += "(-E)"
    if cfg.disable_m_enhancement:
        label += "(-M)"
    return label or "full"


def cmd_align(args: argparse.Namespace) -> int:
    data = Path(args.data)
    cfg = load_config(args.config) if args.config else EremConfig()
    cfg = with_ablation(cfg, disable_e=args.disable_e, disable_m=args.disable_m)

    source = load_graph_bundle(data, 0, args.ent_emb_src, args.rel_emb_src)
    target = load_graph_bundle(data, 1, args.ent_emb_tgt, args.rel_emb_tgt)

    truth_entities_path = Path(args.truth_entities) if args.truth_entities else data / REF_ENTITIES
    truth_relations_path = Path(args.truth_relations) if args.truth_relations else data / REF_RELATIONS
    entity_truth = relation_truth = None
    if truth_entities_path.is_file():
        entity_truth = _truth_lookup(
            read_truth_pairs(truth_entities_path),
            source.graph.entity_index, target.graph.entity_index,
        )
    if truth_relations_path.is_file():
        relation_truth = _truth_lookup(
            read_truth_pairs(truth_relations_path),
            source.graph.relation_index, target.graph.relation_index,
        )
    oracle = ReplayOracle.from_file(args.oracle_replay) if args.oracle_replay else None

    out = Path(args.out)
    _prepare_out_dir(out, args.force)
    try:
        result = run_alignment(
            cfg, source, target,
            oracle=oracle, entity_truth=entity_truth, relation_truth=relation_truth,
        )

        write_anchor_dump(
            out / "anchors_entities.tsv", result.entity_anchors,
            source.graph.entity_ids, target.graph.entity_ids,
        )
        write_anchor_dump(
            out / "anchors_relations.tsv", result.relation_anchors,
            source.graph.relation_ids, target.graph.relation_ids,
        )
        if args.dump_plans:
            write_matrix(out / "psi_entities.bin", result.entity_plan.entries)
            write_matrix(out / "psi_relations.bin", result.relation_plan.entries)

        ea_iters, ra_iters, objective = [], [], []
        for rec in result.trace:
            base = {"iteration": rec.iteration}
            if rec.entity_metrics:
                ea_iters.append({**base, **rec.entity_metrics.to_dict(),
                                 "anchors": rec.entity_anchor_count,
                                 "hard_anchors": rec.hard_entity_count})
            if rec.relation_metrics:
                ra_iters.append({**base, **rec.relation_metrics.to_dict(),
                                 "anchors": rec.relation_anchor_count,
                                 "hard_anchors": rec.hard_relation_count})
            objective.append({
                "iteration": rec.iteration,
                "entity": rec.entity_objective,
                "relation": rec.relation_objective,
                "total": rec.total_objective,
                "entity_anchors": rec.entity_anchor_count,
                "relation_anchors": rec.relation_anchor_count,
            })
        final = result.trace[-1]
        report = {
            "ablation": _ablation_label(cfg),
            "entity": _metrics_json(final.entity_metrics, ea_iters),
            "relation": _metrics_json(final.relation_metrics, ra_iters),
            "objective": objective,
        }
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")

        inputs = [data / name for name in
                  ("ent_ids_1", "ent_ids_2", "rel_ids_1", "rel_ids_2", "triples_1", "triples_2")]
        inputs += [Path(args.ent_emb_src) if args.ent_emb_src else data / ENT_EMB[0],
                   Path(args.ent_emb_tgt) if args.ent_emb_tgt else data / ENT_EMB[1],
                   Path(args.rel_emb_src) if args.rel_emb_src else data / REL_EMB[0],
                   Path(args.rel_emb_tgt) if args.rel_emb_tgt else data / REL_EMB[1]]
        for optional in (truth_entities_path, truth_relations_path):
            if optional.is_file():
                inputs.append(optional)
        if args.oracle_replay:
            inputs.append(Path(args.oracle_replay))
        if args.config:
            inputs.append(Path(args.config))
        manifest = {
            "tool": "erem",
            "version": __version__,
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "config": cfg.to_dict(),
            "inputs": {str(p): _sha256(p) for p in inputs},
            "outputs": sorted(p.name for p in out.iterdir()),
        }
        manifest["outputs"].append("manifest.json")
        manifest["outputs"].sort()
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    except Exception:
        shutil.rmtree(out, ignore_errors=True)
        raise
    print(f"wrote {out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    truth_pairs = read_truth_pairs(args.truth)
    if args.anchors:
        rows = read_anchor_dump(args.anchors)
        predicted = {src: tgt for src, tgt, _ in rows}
        hits = sum(1 for s, t in truth_pairs if predicted.get(s) == t)
        score = hits / len(truth_pairs) if truth_pairs else 0.0
        report = MetricsReport(args.task, score, score, score, len(truth_pairs))
    else:
        if not (args.src_ids and args.tgt_ids):
            raise EremError("--plan evaluation needs --src-ids and --tgt-ids")
        plan = read_matrix(args.plan)
        cost = read_matrix(args.fallback_cost) if args.fallback_cost else np.zeros(plan.shape)
        truth = _truth_lookup(truth_pairs, _id_map_index(args.src_ids), _id_map_index(args.tgt_ids))
        report = evaluate_plan(plan, cost, truth, args.task)
    doc = report.to_dict()
    doc["per_iteration"] = []
    print(json.dumps(doc, indent=2))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        entity_count=args.entities,
        relation_count=args.relations,
        triple_count=args.triples,
        seed=args.seed,
        embedding_dim=args.dim,
        embedding_noise_sigma=args.sigma,
        triple_dropout=args.dropout,
    )
    out = Path(args.out)
    _prepare_out_dir(out, args.force)
    try:
        write_bundle(out, generate_pair(spec))
    except Exception:
        shutil.rmtree(out, ignore_errors=True)
        raise
    print(f"wrote {out}")
    return 0


def cmd_export_prompts(args: argparse.Namespace) -> int:
    data = Path(args.data)
    src_g = load_graph(data, 0)
    tgt_g = load_graph(data, 1)
    ent_cost = read_matrix(args.ent_cost)
    rel_cost = read_matrix(args.rel_cost)
    if ent_cost.shape != (src_g.num_entities, tgt_g.num_entities):
        raise EremError(f"entity cost shape {ent_cost.shape} does not match the graphs")
    if rel_cost.shape != (src_g.num_relations, tgt_g.num_relations):
        raise EremError(f"relation cost shape {rel_cost.shape} does not match the graphs")

    queries = [OracleQuery(step=TASK_DESCRIPTION, subject_id="-", subject_name="-")]
    for i in range(src_g.num_entities):
        picks = top_k_candidates(ent_cost[i], k=min(args.top_k, tgt_g.num_entities))
        queries.append(OracleQuery(
            step=INITIAL_ENTITY_ALIGN,
            subject_id=str(src_g.entity_ids[i]),
            subject_name=src_g.entity_names[i],
            candidates=tuple((str(tgt_g.entity_ids[j]), tgt_g.entity_names[j]) for j in picks),
        ))
    for r in range(src_g.num_relations):
        picks = top_k_candidates(rel_cost[r], k=min(args.top_k, tgt_g.num_relations))
        queries.append(OracleQuery(
            step=INITIAL_RELATION_ALIGN,
            subject_id=str(src_g.relation_ids[r]),
            subject_name=src_g.relation_names[r],
            candidates=tuple((str(tgt_g.relation_ids[j]), tgt_g.relation_names[j]) for j in picks),
        ))

    out = Path(args.out)
    _prepare_out_dir(out, args.force)
    try:
        index = write_prompt_files(out, queries)
        (out / "index.json").write_text(json.dumps(index, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except Exception:
        shutil.rmtree(out, ignore_errors=True)
        raise
    print(f"wrote {len(index)} prompts to {out}")
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    data = Path(args.data)
    stats: dict = {}
    for side, key in enumerate(("source", "target")):
        g = load_graph(data, side)
        rkg = kgt_transform(g)
        degrees = [len(g.out_adj[e]) + len(g.in_adj[e]) for e in range(g.num_entities)]
        stats[key] = {
            "entities": g.num_entities,
            "relations": g.num_relations,
            "triples": len(g.triples),
            "degree_max": max(degrees, default=0),
            "degree_mean": (sum(degrees) / len(degrees)) if degrees else 0.0,
            "relation_graph_links": sum(len(s) for s in rkg.rel_adj) // 2,
        }
    if args.anchors:
        rows = read_anchor_dump(args.anchors)
        stats["anchors"] = {
            "total": len(rows),
            "hard": sum(1 for _, _, tier in rows if tier == "hard"),
        }
    print(json.dumps(stats, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="erem", description="Knowledge-graph entity/relation alignment")
    sub = parser.add_subparsers(dest="command", required=True)

    p_align = sub.add_parser("align", help="run the alignment loop on a bundle directory")
    p_align.add_argument("data", help="bundle directory (two-sided id maps, triples, embeddings)")
    p_align.add_argument("--out", required=True)
    p_align.add_argument("--config")
    p_align.add_argument("--force", action="store_true")
    p_align.add_argument("--ent-emb-src")
    p_align.add_argument("--ent-emb-tgt")
    p_align.add_argument("--rel-emb-src")
    p_align.add_argument("--rel-emb-tgt")
    p_align.add_argument("--truth-entities")
    p_align.add_argument("--truth-relations")
    p_align.add_argument("--oracle-replay")
    p_align.add_argument("--disable-e", action="store_true")
    p_align.add_argument("--disable-m", action="store_true")
    p_align.add_argument("--dump-plans", action="store_true")
    p_align.set_defaults(func=cmd_align)

    p_eval = sub.add_parser("eval", help="score an anchor dump or plan against ground truth")
    group = p_eval.add_mutually_exclusive_group(required=True)
    group.add_argument("--anchors")
    group.add_argument("--plan")
    p_eval.add_argument("--truth", required=True)
    p_eval.add_argument("--task", choices=("EA", "RA"), default="EA")
    p_eval.add_argument("--src-ids", help="id map for plan rows (required with --plan)")
    p_eval.add_argument("--tgt-ids", help="id map for plan columns (required with --plan)")
    p_eval.add_argument("--fallback-cost", help="EREMEMB1 matrix for tie-breaking")
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a ground-truthed synthetic bundle")
    p_synth.add_argument("--entities", type=_positive_int, required=True)
    p_synth.add_argument("--relations", type=_positive_int, required=True)
    p_synth.add_argument("--triples", type=int, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--dim", type=int, default=32)
    p_synth.add_argument("--sigma", type=float, default=0.0)
    p_synth.add_argument("--dropout", type=float, default=0.0)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--force", action="store_true")
    p_synth.set_defaults(func=cmd_synth)

    p_export = sub.add_parser("export-prompts", help="write one adviser prompt file per query")
    p_export.add_argument("data")
    p_export.add_argument("--ent-cost", required=True, help="EREMEMB1 entity cost matrix")
    p_export.add_argument("--rel-cost", required=True, help="EREMEMB1 relation cost matrix")
    p_export.add_argument("-k", "--top-k", type=_positive_int, default=10)
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--force", action="store_true")
    p_export.set_defaults(func=cmd_export_prompts)

    p_inspect = sub.add_parser("inspect", help="print graph and anchor statistics")
    p_inspect.add_argument("data")
    p_inspect.add_argument("--anchors")
    p_inspect.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("EREM_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EremError, OSError, ValueError) as exc:
        print(f"erem {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
