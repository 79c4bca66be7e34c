import pytest

from treecut.generate import SAMPLE8_ARCS, sample8_dag
from treecut.graph import (CycleError, DirectedGraph, GraphError, UndirectedGraph, augment,
                           biconnected_components, connected_components, find_cycle, is_forest,
                           moralize, primal_graph, remove_vertices, subgraph)

A, B, C, D, E, F, G, H = range(8)


def test_directed_basics():
    g = DirectedGraph(3, [(0, 2), (1, 2)])
    assert g.parents(2) == (0, 1)
    assert g.children(0) == (2,)
    assert g.family(2) == (0, 1, 2)
    assert g.is_acyclic()
    assert g.topological_order() == [0, 1, 2]


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (0, 1)], [(0, 5)]])
def test_directed_rejects_bad_edges(edges):
    with pytest.raises(GraphError):
        DirectedGraph(2, edges)


def test_directed_cycle_witness():
    g = DirectedGraph(3, [(0, 1), (1, 2), (2, 0)])
    cyc = g.find_cycle()
    assert sorted(cyc) == [0, 1, 2]
    with pytest.raises(CycleError):
        moralize(g)


def test_moralize_marries_parents():
    # v-structure A -> C <- B
    m = moralize(DirectedGraph(3, [(0, 2), (1, 2)]))
    assert m.edges == frozenset({(0, 1), (0, 2), (1, 2)})


def test_moralize_chain_is_skeleton():
    g = DirectedGraph(4, [(0, 1), (1, 2), (2, 3)])
    assert moralize(g) == g.skeleton()


def test_sample8_moral_graph_edges():
    m = moralize(sample8_dag())
    skeleton = {tuple(sorted(e)) for e in SAMPLE8_ARCS}
    married = {(B, D), (D, F), (E, G)}  # parents of G, of E, and of H
    assert m.edges == frozenset(skeleton | married)
    assert len(m.edges) == 14


def test_undirected_normalizes():
    g = UndirectedGraph(3, [(2, 0), (0, 2)])
    assert g.edges == frozenset({(0, 2)})
    assert g.neighbors(0) == frozenset({2})
    assert g.degree(1) == 0
    with pytest.raises(GraphError):
        UndirectedGraph(2, [(1, 1)])


def test_augment_and_primal():
    g = UndirectedGraph(4, [(0, 1)])
    h = augment(g, [(1, 2, 3)])
    assert h.edges == frozenset({(0, 1), (1, 2), (1, 3), (2, 3)})
    assert primal_graph([(0, 1), (1, 2, 3)], 4) == h


def test_components_and_cycles():
    g = UndirectedGraph(6, [(0, 1), (1, 2), (2, 0), (3, 4)])
    assert connected_components(g) == [frozenset({0, 1, 2}), frozenset({3, 4}), frozenset({5})]
    assert sorted(find_cycle(g)) == [0, 1, 2]
    assert not is_forest(g)
    assert is_forest(remove_vertices(g, [0]))
    assert subgraph(g, [3, 4]).edges == frozenset({(3, 4)})


def test_biconnected_two_triangles_sharing_vertex():
    g = UndirectedGraph(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    blocks, cut = biconnected_components(g)
    assert blocks == [frozenset({0, 1, 2}), frozenset({2, 3, 4})]
    assert cut == frozenset({2})


def test_biconnected_tree_edges_are_blocks():
    g = UndirectedGraph(4, [(0, 1), (1, 2), (1, 3)])
    blocks, cut = biconnected_components(g)
    assert blocks == [frozenset({0, 1}), frozenset({1, 2}), frozenset({1, 3})]
    assert cut == frozenset({1})
