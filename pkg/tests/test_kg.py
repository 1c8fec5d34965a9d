from __future__ import annotations

import io
import time

import numpy as np
import pytest

from erem.errors import ParseError, ReferentialError
from erem.kg import KnowledgeGraph, kgt_transform, parse_graph

from _reference import entity_neighbors_by_scan, random_graph, rel_triples_by_scan, relation_adjacency_by_scan


def make_graph(n_ent, n_rel, triples):
    return KnowledgeGraph.from_raw(
        [(i, f"e{i}") for i in range(n_ent)],
        [(r, f"r{r}") for r in range(n_rel)],
        triples,
    )


def parse(ents, rels, triples):
    return parse_graph(io.StringIO(ents), io.StringIO(rels), io.StringIO(triples))


def test_parse_small_graph():
    g = parse("0\ta\n1\tb\n2\tc\n", "0\tr1\n1\tr2\n", "0\t0\t1\n1\t1\t2\n")
    assert g.num_entities == 3
    assert g.num_relations == 2
    assert g.triples == ((0, 0, 1), (1, 1, 2))
    assert g.entity_names == ("a", "b", "c")


def test_parse_empty_triples_keeps_isolated_nodes():
    g = parse("0\tonly\n", "0\tr\n", "")
    assert g.num_entities == 1
    assert g.triples == ()
    assert g.out_adj == ((),)
    assert g.in_adj == ((),)


def test_parse_nondense_raw_ids():
    g = parse("10\ta\n99\tb\n", "7\tr\n", "10\t7\t99\n")
    assert g.entity_index == {10: 0, 99: 1}
    assert g.triples == ((0, 0, 1),)


def test_parse_bad_column_count_reports_line():
    with pytest.raises(ParseError, match="line 2"):
        parse("0\ta\n1\tb\tc\n", "0\tr\n", "")
    with pytest.raises(ParseError, match="line 1"):
        parse("0\ta\n", "0\tr\n", "0\t0\n")


def test_parse_unknown_id_is_referential_error():
    with pytest.raises(ReferentialError):
        parse("0\ta\n", "0\tr\n", "0\t0\t5\n")
    with pytest.raises(ReferentialError):
        parse("0\ta\n1\tb\n", "0\tr\n", "0\t3\t1\n")


def test_parse_rejects_negative_and_non_integer_ids():
    with pytest.raises(ParseError):
        parse("-1\ta\n", "0\tr\n", "")
    with pytest.raises(ParseError):
        parse("x\ta\n", "0\tr\n", "")


def test_duplicate_triples_are_collapsed():
    g = make_graph(2, 1, [(0, 0, 1), (0, 0, 1)])
    assert g.triples == ((0, 0, 1),)


def test_one_hop_single_directions():
    g = make_graph(2, 1, [(0, 0, 1)])
    assert g.one_hop_entity_neighbors(0) == [(0, 1, "outgoing")]
    assert g.one_hop_entity_neighbors(1) == [(0, 0, "incoming")]


def test_one_hop_mixed_orientation_sorted():
    g = make_graph(3, 2, [(0, 0, 1), (2, 1, 0)])
    assert g.one_hop_entity_neighbors(0) == [(0, 1, "outgoing"), (1, 2, "incoming")]


def test_one_hop_out_of_range():
    g = make_graph(1, 1, [])
    with pytest.raises(ValueError):
        g.one_hop_entity_neighbors(1)


def test_one_hop_matches_triple_scan_on_random_graphs():
    rng = np.random.default_rng(7)
    for _ in range(25):
        g = random_graph(rng, 12, 4, 30)
        for e in range(g.num_entities):
            assert g.one_hop_entity_neighbors(e) == entity_neighbors_by_scan(g, e)
            assert len(g.one_hop_entity_neighbors(e)) == sum(
                (h == e) + (t == e) for h, _, t in g.triples
            )


def test_adjacency_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g = random_graph(rng, 10, 3, 25)
        rebuilt = sorted((h, r, t) for h in range(g.num_entities) for r, t in g.out_adj[h])
        assert rebuilt == sorted(g.triples)


def test_kgt_shared_entity_link():
    g = make_graph(3, 2, [(0, 0, 1), (1, 1, 2)])
    rkg = kgt_transform(g)
    assert (0, 1, 1) in rkg.rel_triples
    assert rkg.one_hop_relation_neighbors(0) == {1}
    assert rkg.one_hop_relation_neighbors(1) == {0}


def test_kgt_single_triple_is_empty():
    rkg = kgt_transform(make_graph(2, 1, [(0, 0, 1)]))
    assert rkg.rel_triples == ()


def test_kgt_star():
    g = make_graph(4, 3, [(0, 0, 3), (1, 1, 3), (2, 2, 3)])
    rkg = kgt_transform(g)
    assert rkg.one_hop_relation_neighbors(0) == {1, 2}
    assert rkg.one_hop_relation_neighbors(1) == {0, 2}
    assert rkg.one_hop_relation_neighbors(2) == {0, 1}


def test_kgt_chain():
    g = make_graph(4, 3, [(0, 0, 1), (1, 1, 2), (2, 2, 3)])
    rkg = kgt_transform(g)
    assert rkg.one_hop_relation_neighbors(1) == {0, 2}


def test_kgt_self_adjacency_excluded_but_recorded():
    # same relation twice at one entity: a rel-triple exists, adjacency does not
    g = make_graph(3, 1, [(0, 0, 1), (1, 0, 2)])
    rkg = kgt_transform(g)
    assert (0, 1, 0) in rkg.rel_triples
    assert rkg.one_hop_relation_neighbors(0) == frozenset()


def test_kgt_isolated_relation():
    g = make_graph(2, 2, [(0, 0, 1)])
    assert kgt_transform(g).one_hop_relation_neighbors(1) == frozenset()


def test_kgt_out_of_range():
    rkg = kgt_transform(make_graph(2, 1, [(0, 0, 1)]))
    with pytest.raises(ValueError):
        rkg.one_hop_relation_neighbors(3)


def test_kgt_matches_pairwise_scan_on_random_graphs():
    rng = np.random.default_rng(23)
    for _ in range(40):
        g = random_graph(rng, 15, int(rng.integers(2, 9)), 40)
        rkg = kgt_transform(g)
        expected_adj = relation_adjacency_by_scan(g)
        assert [set(s) for s in rkg.rel_adj] == expected_adj
        assert set(rkg.rel_triples) == rel_triples_by_scan(g)


def test_kgt_rel_triples_match_pair_enumeration():
    rng = np.random.default_rng(29)
    for _ in range(20):
        g = random_graph(rng, 10, 5, 25)
        assert set(kgt_transform(g).rel_triples) == rel_triples_by_scan(g)


def test_relation_lookup_cost_tracks_answer_size():
    # hub-free graph with many relations: per-query time must stay flat,
    # which a |R|^2 rescan could not do at this size
    n_rel = 4000
    triples = [(i, r, i + 1) for i, r in zip(range(0, 2 * n_rel, 2), range(n_rel))]
    g = make_graph(2 * n_rel + 1, n_rel, triples)
    rkg = kgt_transform(g)
    start = time.perf_counter()
    for _ in range(5):
        for r in range(n_rel):
            rkg.one_hop_relation_neighbors(r)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
