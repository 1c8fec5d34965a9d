"""Ranking readout and Hits@k / MRR evaluation against ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class GroundTruth:
    """Reference aligned pairs; injective in both coordinates."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        sources = [i for i, _ in pairs]
        targets = [j for _, j in pairs]
        if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
            raise ValueError("ground-truth pairs must be one-to-one")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class MetricsReport:
    """Hits@1, Hits@10 and MRR for one task over one truth set."""

    task: str
    hits1: float
    hits10: float
    mrr: float
    pairs_evaluated: int

    def __post_init__(self):
        if self.task not in ("EA", "RA"):
            raise ValueError(f"task must be 'EA' or 'RA', got {self.task!r}")
        if not (0 <= self.hits1 <= self.hits10 <= 1):
            raise ValueError("expected 0 <= hits1 <= hits10 <= 1")
        if self.mrr < self.hits1 - 1e-12 or self.mrr > 1:
            raise ValueError("expected hits1 <= mrr <= 1")

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "hits1": self.hits1,
            "hits10": self.hits10,
            "mrr": self.mrr,
            "pairs_evaluated": self.pairs_evaluated,
        }


def rank_targets(plan, fallback_cost, src: int) -> list[int]:
    """Target indices for one source, best first.

    Sorted by descending transport mass; ties break by ascending fallback
    cost, then by target index.
    """
    plan_entries = np.asarray(getattr(plan, "entries", plan))
    cost_entries = np.asarray(getattr(fallback_cost, "entries", fallback_cost))
    if plan_entries.shape != cost_entries.shape:
        raise ValueError(
            f"plan shape {plan_entries.shape} != cost shape {cost_entries.shape}"
        )
    if not 0 <= src < plan_entries.shape[0]:
        raise ValueError(f"source index {src} out of range")
    n = plan_entries.shape[1]
    order = np.lexsort((np.arange(n), cost_entries[src], -plan_entries[src]))
    return [int(j) for j in order]


def hits_at_k(rankings: Mapping[int, Sequence[int]], truth: GroundTruth, k: int) -> float:
    """Fraction of truth pairs whose target appears in the source's top k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not truth.pairs:
        return 0.0
    hits = sum(1 for s, t in truth.pairs if t in list(rankings[s])[:k])
    return hits / len(truth.pairs)


def mrr(rankings: Mapping[int, Sequence[int]], truth: GroundTruth) -> float:
    """Mean reciprocal rank of the true target; absent targets score 0."""
    if not truth.pairs:
        return 0.0
    reciprocal = []
    for s, t in truth.pairs:
        ranking = list(rankings[s])
        try:
            reciprocal.append(1.0 / (ranking.index(t) + 1))
        except ValueError:
            pass
    # fsum keeps the mean independent of the order truth pairs arrive in
    return math.fsum(reciprocal) / len(truth.pairs)


def evaluate_plan(plan, fallback_cost, truth: GroundTruth, task: str) -> MetricsReport:
    """Rank every truth source through the plan and score the truth set."""
    rankings = {s: rank_targets(plan, fallback_cost, s) for s, _ in truth.pairs}
    return MetricsReport(
        task=task,
        hits1=hits_at_k(rankings, truth, 1),
        hits10=hits_at_k(rankings, truth, 10),
        mrr=mrr(rankings, truth),
        pairs_evaluated=len(truth),
    )


def read_truth_pairs(path) -> list[tuple[int, int]]:
    """Read ``src_id<TAB>tgt_id`` reference pairs (raw identifiers)."""
    pairs: list[tuple[int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split("\t")
            pairs.append((int(a), int(b)))
    return pairs


def write_truth_pairs(path, pairs: Iterable[tuple[int, int]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in pairs:
            fh.write(f"{a}\t{b}\n")
