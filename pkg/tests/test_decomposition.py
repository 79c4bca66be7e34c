"""Decomposition of the eight-variable example and generic invariants.

Expected structures for the example: the
moral graph is already chordal, the clique tree is a chain, and the three
separator levels merge into {D,E,F,G,H} and {B,...,H}.
"""
import random

import numpy as np
import pytest

from treecut.decomposition import (DecompositionError, JoinTree, build_primary_join_tree, cycle_cutset, decompose,
                                   find_ordering, induced_width, is_chordal, max_cliques, merge_join_tree,
                                   perfect_elimination_ordering, secondary_join_trees, tradeoff_report,
                                   triangulate)
from treecut.generate import sample8_dag, random_dag
from treecut.graph import UndirectedGraph, is_forest, moralize, subgraph

A, B, C, D, E, F, G, H = range(8)
S = lambda *vs: frozenset(vs)  # noqa: E731


@pytest.fixture
def sample_graph():
    return moralize(sample8_dag())


def test_sample8_is_chordal(sample_graph):
    assert is_chordal(sample_graph)
    ch = triangulate(sample_graph, find_ordering(sample_graph, "min-fill"))
    assert not ch.fill_edges
    assert ch.width == 3


def test_sample8_cliques(sample_graph):
    assert set(decompose(sample_graph).cliques) == {S(A, B), S(B, C, D), S(B, D, G), S(G, D, E, F), S(G, E, F, H)}


def test_sample8_levels(sample_graph):
    dec = decompose(sample_graph)
    assert dec.bounds == [3, 2, 1]
    t0, t1, t2 = (t for _, t in dec.levels)
    assert len(t0.clusters) == 5
    assert S(D, E, F, G, H) in t1.clusters and len(t1.clusters) == 4
    assert set(t2.clusters) == {S(A, B), S(B, C, D, E, F, G, H)}
    for s, t in dec.levels:
        assert t.separator_width <= s
        assert t.is_valid(sample_graph)


def test_unknown_level_lists_available(sample_graph):
    with pytest.raises(DecompositionError, match=r"\{3, 2, 1\}"):
        decompose(sample_graph).level(5)


def test_sample8_cutsets(sample_graph):
    whole = cycle_cutset(sample_graph)
    assert whole.exact and whole.size == 3
    assert cycle_cutset(subgraph(sample_graph, [D, E, F, G, H])).size == 2
    for c in decompose(sample_graph).primary.clusters:
        assert cycle_cutset(subgraph(sample_graph, c)).size <= 2
    assert is_forest(subgraph(sample_graph, sample_graph.vertices - whole.vertices))


def test_sample8_tradeoff_report(sample_graph):
    rep = tradeoff_report(sample_graph, decompose(sample_graph))
    rows = [(l.s, l.r, l.c) for l in rep.levels]
    assert rows == [(3, 3, 2), (2, 4, 2), (1, 6, 3)]
    assert rep.dominating() == [(4, 2), (5, 1)]
    assert "(k^5, linear)" in rep.table()


def test_min_fill_on_cycle_adds_chords():
    g = UndirectedGraph(5, [(i, (i + 1) % 5) for i in range(5)])
    ch = triangulate(g, find_ordering(g))
    assert len(ch.fill_edges) == 2
    assert is_chordal(ch.graph)
    assert induced_width(g, ch.order) == 2


def test_given_ordering():
    g = UndirectedGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert find_ordering(g, "given", [3, 2, 1, 0]) == (3, 2, 1, 0)
    with pytest.raises(DecompositionError):
        find_ordering(g, "given", [0, 1])


def test_max_cliques_rejects_non_chordal():
    with pytest.raises(DecompositionError):
        max_cliques(UndirectedGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))


def test_peo_random_ties(sample_graph):
    for seed in range(5):
        assert perfect_elimination_ordering(sample_graph, random.Random(seed)) is not None


def test_disconnected_graph_is_forest_of_trees():
    g = UndirectedGraph(5, [(0, 1), (1, 2), (3, 4)])
    dec = decompose(g)
    assert len(dec.primary.components()) == 2
    assert dec.primary.is_valid(g)


def test_edgeless_graph_single_level():
    dec = decompose(UndirectedGraph(3))
    assert dec.bounds == [0]
    assert len(dec.level(0).clusters) == 3


def test_merge_absorbs_subsets():
    t = build_primary_join_tree([S(0, 1, 2), S(1, 2, 3), S(2, 3, 4)])
    merged = merge_join_tree(t, 1)
    assert merged.clusters == (S(0, 1, 2, 3, 4),)


def test_join_tree_violation_detected():
    bad = JoinTree((S(0, 1), S(2, 3), S(1, 3)), ((0, 1), (1, 2)), 2)
    assert bad.violations()


@pytest.mark.parametrize("seed", range(15))
def test_random_levels_are_valid(seed):
    rng = np.random.default_rng(seed)
    g = moralize(random_dag(rng, int(rng.integers(3, 13)), 3))
    dec = decompose(g)
    assert dec.bounds == sorted(set(dec.bounds), reverse=True)
    prev = None
    for s, t in secondary_join_trees(dec.primary):
        assert t.is_valid(g)
        assert t.separator_width <= s
        if prev is not None:
            assert len(t.clusters) <= len(prev.clusters)
        prev = t
