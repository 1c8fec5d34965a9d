from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erem.anchors import (
    AnchorSet,
    derive_hard_entity_anchors,
    derive_hard_relation_anchors,
    init_anchor_set,
    promote_anchors,
)
from erem.kg import KnowledgeGraph

from _reference import (
    hard_entity_pairs_by_scan,
    hard_relation_pairs_by_scan,
    random_anchor_set,
    random_graph,
)


def make_graph(n_ent, n_rel, triples):
    return KnowledgeGraph.from_raw(
        [(i, f"e{i}") for i in range(n_ent)],
        [(r, f"r{r}") for r in range(n_rel)],
        triples,
    )


def test_anchor_set_enforces_one_to_one():
    with pytest.raises(ValueError):
        AnchorSet([(0, 1), (0, 2)])
    with pytest.raises(ValueError):
        AnchorSet([(0, 1), (2, 1)])
    with pytest.raises(ValueError):
        AnchorSet([(0, 1)], hard=[(0, 2)])


def test_anchor_set_tiers():
    s = AnchorSet([(0, 1), (2, 3)], hard=[(2, 3)])
    assert s.tier((0, 1)) == "normal"
    assert s.tier((2, 3)) == "hard"
    assert s.hard_pairs() <= s.pairs()


def test_init_anchor_simple():
    cost = np.array([[0.1, 0.5], [0.6, 0.2]])
    assert init_anchor_set(cost, 0.3).pairs() == {(0, 0), (1, 1)}


def test_init_anchor_column_conflict_cheaper_row_wins():
    cost = np.array([[0.1, 0.2], [0.15, 0.9]])
    assert init_anchor_set(cost, 0.3).pairs() == {(0, 0)}


def test_init_anchor_nothing_under_threshold():
    assert init_anchor_set(np.array([[0.4, 0.5]]), 0.3).pairs() == frozenset()


def test_init_anchor_requires_strict_row_minimum():
    cost = np.array([[0.1, 0.1, 0.9]])
    assert init_anchor_set(cost, 0.3).pairs() == frozenset()


def test_init_anchor_all_normal_tier():
    s = init_anchor_set(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert s.hard_pairs() == frozenset()
    assert len(s) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_init_anchor_injective_on_random_costs(seed):
    rng = np.random.default_rng(seed)
    cost = rng.uniform(0, 1, size=(rng.integers(1, 12), rng.integers(1, 12)))
    s = init_anchor_set(cost, threshold=0.6)
    sources = [i for i, _ in s.pairs()]
    targets = [j for _, j in s.pairs()]
    assert len(set(sources)) == len(sources)
    assert len(set(targets)) == len(targets)
    for i, j in s.pairs():
        assert cost[i, j] < 0.6
        assert (cost[i] > cost[i, j]).sum() == cost.shape[1] - 1


def test_hard_entity_single_triple_pair():
    g = make_graph(2, 1, [(0, 0, 1)])
    g2 = make_graph(2, 1, [(0, 0, 1)])
    ye = AnchorSet([(0, 0), (1, 1)])
    yr = AnchorSet([(0, 0)])
    upgraded = derive_hard_entity_anchors(g, g2, ye, yr)
    assert upgraded.hard_pairs() == {(0, 0), (1, 1)}
    assert upgraded.pairs() == ye.pairs()


def test_hard_entity_requires_relation_anchor():
    g = make_graph(2, 1, [(0, 0, 1)])
    g2 = make_graph(2, 1, [(0, 0, 1)])
    ye = AnchorSet([(0, 0), (1, 1)])
    upgraded = derive_hard_entity_anchors(g, g2, ye, AnchorSet())
    assert upgraded.hard_pairs() == frozenset()


def test_hard_entity_requires_matching_orientation():
    g = make_graph(2, 1, [(0, 0, 1)])
    g2 = make_graph(2, 1, [(1, 0, 0)])  # reversed edge on the target side
    ye = AnchorSet([(0, 0), (1, 1)])
    yr = AnchorSet([(0, 0)])
    assert derive_hard_entity_anchors(g, g2, ye, yr).hard_pairs() == frozenset()


def test_hard_entity_parent_child_example():
    # two people linked by an anchored parent relation on both sides
    g = make_graph(2, 1, [(0, 0, 1)])
    g2 = make_graph(2, 1, [(0, 0, 1)])
    people = AnchorSet([(0, 0), (1, 1)])
    parent = AnchorSet([(0, 0)])
    assert derive_hard_entity_anchors(g, g2, people, parent).hard_pairs() == {(0, 0), (1, 1)}


def test_hard_entity_out_of_range():
    g = make_graph(2, 1, [(0, 0, 1)])
    with pytest.raises(ValueError):
        derive_hard_entity_anchors(g, g, AnchorSet([(0, 5)]), AnchorSet())


def test_hard_relation_from_hard_entities():
    g = make_graph(2, 1, [(0, 0, 1)])
    g2 = make_graph(2, 1, [(0, 0, 1)])
    ye = AnchorSet([(0, 0), (1, 1)], hard=[(0, 0), (1, 1)])
    yr = AnchorSet([(0, 0)])
    assert derive_hard_relation_anchors(g, g2, ye, yr).hard_pairs() == {(0, 0)}


def test_hard_relation_ignores_normal_entity_pairs():
    g = make_graph(2, 1, [(0, 0, 1)])
    g2 = make_graph(2, 1, [(0, 0, 1)])
    ye = AnchorSet([(0, 0), (1, 1)])  # normal tier only
    yr = AnchorSet([(0, 0)])
    assert derive_hard_relation_anchors(g, g2, ye, yr).hard_pairs() == frozenset()


def test_hard_derivations_match_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(40):
        g = random_graph(rng, 10, 4, 25)
        g2 = random_graph(rng, 10, 4, 25)
        ye = random_anchor_set(rng, 10, 10, density=0.7, hard_share=0.4)
        yr = random_anchor_set(rng, 4, 4, density=0.8, hard_share=0.3)
        assert (
            derive_hard_entity_anchors(g, g2, ye, yr).hard_pairs()
            == hard_entity_pairs_by_scan(g, g2, ye, yr)
        )
        assert (
            derive_hard_relation_anchors(g, g2, ye, yr).hard_pairs()
            == hard_relation_pairs_by_scan(g, g2, ye, yr)
        )


def test_promote_adds_confident_pairs():
    plan = np.array([[0.5, 0.0], [0.0, 0.5]])
    s = promote_anchors(plan, AnchorSet())
    assert s.pairs() == {(0, 0), (1, 1)}
    assert s.hard_pairs() == frozenset()


def test_promote_uniform_plan_adds_nothing():
    plan = np.full((2, 2), 0.25)
    assert promote_anchors(plan, AnchorSet()).pairs() == frozenset()


def test_promote_respects_taken_columns():
    # column 0 already owned by source 1; row 0 cannot take it
    plan = np.array([[0.5, 0.0], [0.4, 0.1]])
    s = promote_anchors(plan, AnchorSet([(1, 0)]))
    assert s.pairs() == {(1, 0)}


def test_promote_never_removes_and_keeps_tiers():
    existing = AnchorSet([(0, 1)], hard=[(0, 1)])
    plan = np.array([[0.0, 0.5], [0.5, 0.0]])
    s = promote_anchors(plan, existing)
    assert (0, 1) in s
    assert s.is_hard((0, 1))
    assert (1, 0) in s


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_promote_monotone_and_injective(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 10)), int(rng.integers(1, 10))
    plan = rng.dirichlet(np.ones(n), size=m) / m
    existing = random_anchor_set(rng, m, n, density=0.3)
    out = promote_anchors(plan, existing, epsilon=float(rng.uniform(0, 0.2)))
    assert out.pairs() >= existing.pairs()
    sources = [i for i, _ in out.pairs()]
    targets = [j for _, j in out.pairs()]
    assert len(set(sources)) == len(sources)
    assert len(set(targets)) == len(targets)
