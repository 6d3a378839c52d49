import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdsim.errors import FormatError, ParameterError
from spdsim.graph import (
    UndirectedGraph,
    erdos_renyi,
    format_edgelist,
    is_adjacent,
    nonadjacent_predecessors,
    parse_edgelist,
    read_edgelist,
    write_edgelist,
)


@st.composite
def graphs(draw, max_p=9):
    p = draw(st.integers(1, max_p))
    pairs = list(combinations(range(1, p + 1), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return UndirectedGraph(p, chosen)


def test_er_endpoints():
    assert erdos_renyi(10, 0, seed=5).n_edges == 0
    g = erdos_renyi(10, 1, seed=5)
    assert g.n_edges == 45
    assert g == UndirectedGraph.complete(10)


def test_er_edge_count_within_four_sd():
    g = erdos_renyi(100, 0.25, seed=11)
    # brute-force count over all candidate pairs
    count = sum(g.is_adjacent(i, j) for i, j in combinations(range(1, 101), 2))
    assert count == g.n_edges
    mean, sd = 4950 * 0.25, math.sqrt(4950 * 0.25 * 0.75)
    assert abs(count - mean) <= 4 * sd


def test_er_is_deterministic():
    assert erdos_renyi(30, 0.3, 42) == erdos_renyi(30, 0.3, 42)
    assert erdos_renyi(30, 0.3, 42).edges == erdos_renyi(30, 0.3, 42).edges
    assert erdos_renyi(30, 0.3, 42) != erdos_renyi(30, 0.3, 43)


def test_er_inclusion_frequency():
    p, d, trials = 20, 0.3, 1000
    counts = np.zeros((p, p))
    for t in range(trials):
        counts += erdos_renyi(p, d, seed=t).adjacency
    freq = counts[np.triu_indices(p, 1)] / trials
    overall = freq.mean()
    n = trials * p * (p - 1) / 2
    assert abs(overall - d) <= 5 * math.sqrt(d * (1 - d) / n)
    # and no single edge slot is wildly off
    assert np.all(np.abs(freq - d) <= 5 * math.sqrt(d * (1 - d) / trials))


@pytest.mark.parametrize("p, d", [(0, 0.5), (-3, 0.5), (2.5, 0.5), (5, -0.1), (5, 1.5)])
def test_er_rejects_bad_parameters(p, d):
    with pytest.raises(ParameterError):
        erdos_renyi(p, d, 0)


def test_is_adjacent_examples():
    assert is_adjacent(UndirectedGraph.complete(3), 1, 2)
    assert not is_adjacent(UndirectedGraph.empty(3), 1, 2)
    g = UndirectedGraph(2, [(1, 2)])
    assert is_adjacent(g, 2, 1)
    assert not is_adjacent(g, 1, 1)


@pytest.mark.parametrize("i, j", [(0, 1), (1, 4), (4, 4)])
def test_is_adjacent_range(i, j):
    with pytest.raises(ParameterError):
        is_adjacent(UndirectedGraph(3), i, j)


def test_nonadjacent_predecessors_examples():
    assert nonadjacent_predecessors(UndirectedGraph.empty(4), 4) == [1, 2, 3]
    assert nonadjacent_predecessors(UndirectedGraph.complete(4), 4) == []
    assert nonadjacent_predecessors(UndirectedGraph(3, [(1, 2), (2, 3)]), 3) == [1]
    assert nonadjacent_predecessors(UndirectedGraph(3), 1) == []
    with pytest.raises(ParameterError):
        nonadjacent_predecessors(UndirectedGraph(3), 4)


def test_constructor_rejects_self_loops_and_range():
    with pytest.raises(ParameterError):
        UndirectedGraph(3, [(2, 2)])
    with pytest.raises(ParameterError):
        UndirectedGraph(3, [(1, 4)])


def test_graph_is_immutable():
    g = UndirectedGraph(3, [(1, 2)])
    with pytest.raises(ValueError):
        g.adjacency[0, 2] = True


@given(graphs())
def test_adjacency_symmetric(g):
    for i in range(1, g.p + 1):
        for j in range(1, g.p + 1):
            assert is_adjacent(g, i, j) == is_adjacent(g, j, i)
    assert all(i < j for i, j in g.edges)


@given(graphs())
def test_predecessors_partition(g):
    for i in range(1, g.p + 1):
        non = nonadjacent_predecessors(g, i)
        adj = [j for j in range(1, i) if is_adjacent(g, i, j)]
        assert sorted(non + adj) == list(range(1, i))
        assert not set(non) & set(adj)
        assert non == sorted(non)


@given(graphs())
@settings(max_examples=50)
def test_edgelist_roundtrip(g):
    assert parse_edgelist(format_edgelist(g)) == g


def test_edgelist_format_and_comments(tmp_path):
    g = UndirectedGraph(4, [(2, 4), (1, 2)])
    path = tmp_path / "g.edges"
    write_edgelist(g, path)
    assert path.read_text() == "p 4\n1 2\n2 4\n"
    text = "# header comment\n\np 4   # four vertices\n1 2\n\n# an edge\n2 4\n"
    assert parse_edgelist(text) == g
    assert read_edgelist(path) == g


@pytest.mark.parametrize(
    "text",
    ["", "1 2\n", "p x\n", "p 3\n1\n", "p 3\n2 1\n", "p 3\n1 4\n", "p 3\n1 a\n", "q 3\n"],
)
def test_edgelist_malformed(text):
    with pytest.raises(FormatError):
        parse_edgelist(text)
