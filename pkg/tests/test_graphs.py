import itertools
import json

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from mldegree.graphs import (Graph, add_pendant, clique_decomposition, complete_graph,
                             cycle_graph, empty_graph, induced_subgraph, is_chordal,
                             is_perfect_elimination_ordering, maximum_cardinality_search,
                             model_space, parse_graph, path_graph, remove_vertex, star_graph)


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def test_validation():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])


def test_constructors():
    assert len(cycle_graph(5).edges) == 5
    assert len(complete_graph(4).edges) == 6
    assert star_graph(4).neighbors(0) == {1, 2, 3}
    assert empty_graph(3).non_edges() == [(0, 1), (0, 2), (1, 2)]
    g = add_pendant(cycle_graph(4))
    assert g.n == 5 and g.has_edge(0, 4)
    assert remove_vertex(g, 4) == cycle_graph(4)


def test_parse_named_and_json(tmp_path):
    assert parse_graph("cycle:6") == cycle_graph(6)
    f = tmp_path / "g.json"
    f.write_text(json.dumps(path_graph(3).to_json()))
    assert parse_graph(str(f)) == path_graph(3)


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3,\n "edges": [[0, 1],]}')
    with pytest.raises(ValueError, match="line 2"):
        parse_graph(str(bad))
    with pytest.raises(ValueError):
        parse_graph("cycle:x")
    with pytest.raises(ValueError):
        parse_graph(str(tmp_path / "missing.json"))


@pytest.mark.parametrize("g,expected", [
    (cycle_graph(4), False), (cycle_graph(3), True), (path_graph(5), True),
    (complete_graph(5), True), (star_graph(5), True),
    (Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]), True),
])
def test_chordal_examples(g, expected):
    assert is_chordal(g).chordal is expected


@given(graphs())
def test_chordality_matches_networkx(g):
    res = is_chordal(g)
    assert res.chordal == nx.is_chordal(to_nx(g))
    if res.chordal:
        assert sorted(res.ordering) == list(range(g.n))
        assert is_perfect_elimination_ordering(g, res.ordering)


@given(graphs())
def test_mcs_visits_all(g):
    assert sorted(maximum_cardinality_search(g)) == list(range(g.n))


def test_clique_tree_examples():
    t = clique_decomposition(path_graph(3))
    assert t.cliques == [frozenset({0, 1}), frozenset({1, 2})]
    assert t.separators == [frozenset({1})]
    assert clique_decomposition(complete_graph(4)).cliques == [frozenset(range(4))]
    chord = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    t = clique_decomposition(chord)
    assert set(t.cliques) == {frozenset({0, 1, 2}), frozenset({0, 2, 3})}
    assert t.separators == [frozenset({0, 2})]
    with pytest.raises(ValueError):
        clique_decomposition(cycle_graph(5))


@given(graphs())
def test_clique_tree_properties(g):
    if not is_chordal(g):
        return
    t = clique_decomposition(g)
    assert t.has_running_intersection()
    assert set().union(*t.cliques) == set(range(g.n))
    assert len(t.separators) == len(t.cliques) - 1
    for (a, b), sep in zip(t.tree_edges, t.separators):
        assert sep == t.cliques[a] & t.cliques[b]
    rebuilt = {p for c in t.cliques for p in itertools.combinations(sorted(c), 2)}
    assert rebuilt == set(g.edges)
    want = {frozenset(c) for c in nx.find_cliques(to_nx(g))}
    assert set(t.cliques) == want


@given(graphs(), st.data())
def test_induced_subgraph(g, data):
    keep = data.draw(st.lists(st.integers(0, g.n - 1), min_size=1, unique=True))
    h = induced_subgraph(g, keep)
    ref = nx.convert_node_labels_to_integers(to_nx(g).subgraph(sorted(keep)), ordering="sorted")
    assert h.n == len(keep)
    assert set(h.edges) == {tuple(sorted(e)) for e in ref.edges}


@given(graphs())
def test_model_space_partition(g):
    ms = model_space(g)
    assert len(ms.support) + len(ms.co_support) == g.n * (g.n + 1) // 2
    assert set(ms.co_support).isdisjoint(ms.support)


@given(graphs())
def test_json_roundtrip(g):
    assert Graph.from_json(json.loads(json.dumps(g.to_json()))) == g


@given(graphs())
def test_connectivity_matches_networkx(g):
    assert g.is_connected() == nx.is_connected(to_nx(g))
