import math

import numpy as np
import pytest

from longcycle import (
    Graph,
    InvalidParameterError,
    Seed,
    components,
    degree_profile,
    induced_subgraph,
    read_edge_list,
    sample_gnp,
    write_edge_list,
)

from conftest import complete_graph, cycle_graph, path_graph


def test_empty_and_complete():
    g = sample_gnp(0, 0, 1)
    assert g.n == 0 and g.m == 0
    k5 = sample_gnp(5, 5, 123)
    assert k5.m == 10  # p = 1 forces every pair


def test_invalid_c():
    with pytest.raises(InvalidParameterError):
        sample_gnp(10, -0.5, 1)
    with pytest.raises(InvalidParameterError):
        sample_gnp(10, 11, 1)


def test_determinism_bit_exact():
    a = sample_gnp(1000, 3, Seed(42))
    b = sample_gnp(1000, 3, Seed(42))
    assert a == b
    c = sample_gnp(1000, 3, Seed(43))
    assert a != c


def test_edge_count_moments():
    # mean over 200 seeds within 3 sigma of the binomial mean
    n, c, trials = 1000, 3.0, 200
    base = Seed(9)
    counts = [sample_gnp(n, c, base.child(t)).m for t in range(trials)]
    pairs = n * (n - 1) / 2
    p = c / n
    mean = pairs * p
    sigma = math.sqrt(pairs * p * (1 - p))
    assert abs(np.mean(counts) - mean) <= 3 * sigma / math.sqrt(trials)


def test_adjacency_edge_consistency():
    g = sample_gnp(300, 4, 7)
    assert int(g.degrees.sum()) == 2 * g.m
    for v in range(0, 300, 37):
        for w in g.adj[v]:
            assert v in g.adj[w]
    assert len(g.edge_set) == g.m


def test_no_self_loops_or_duplicates():
    with pytest.raises(InvalidParameterError):
        Graph(3, [(0, 0)])
    with pytest.raises(InvalidParameterError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidParameterError):
        Graph(3, [(0, 5)])


def test_components_basic():
    assert components(Graph(3, [])) == [[0], [1], [2]]
    assert components(path_graph(3)) == [[0, 1, 2]]
    two_triangles = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert components(two_triangles) == [[0, 1, 2], [3, 4, 5]]


def test_components_relabeling_invariant():
    g = sample_gnp(40, 1.5, 3)
    perm = np.random.default_rng(0).permutation(40)
    remapped = Graph(40, [(int(perm[u]), int(perm[v])) for u, v in g.edges()])
    orig = {frozenset(perm[v] for v in cell) for cell in components(g)}
    new = {frozenset(cell) for cell in components(remapped)}
    assert orig == new


def test_induced_subgraph():
    k4 = complete_graph(4)
    sub, idx = induced_subgraph(k4, [0, 1, 2])
    assert sub.m == 3 and sub.n == 3
    empty, _ = induced_subgraph(k4, [])
    assert empty.n == 0
    c5 = cycle_graph(5)
    sub, idx = induced_subgraph(c5, [0, 1])
    assert sub.m == 1
    with pytest.raises(InvalidParameterError):
        induced_subgraph(k4, [7])


def test_degree_profile():
    assert degree_profile(complete_graph(4)) == [0, 0, 0, 4]
    assert degree_profile(Graph(3, [])) == [3]
    g = sample_gnp(500, 2, 5)
    assert sum(degree_profile(g)) == 500


def test_degree_profile_poisson_tail():
    # fraction of degree <= 1 vertices approaches (1+c) e^(-c)
    n, c, trials = 100000, 10.0, 50
    base = Seed(77)
    total = 0
    for t in range(trials):
        prof = degree_profile(sample_gnp(n, c, base.child(t)))
        total += prof[0] + (prof[1] if len(prof) > 1 else 0)
    frac = total / (n * trials)
    assert abs(frac - (1 + c) * math.exp(-c)) <= 1e-3


def test_edge_list_roundtrip(tmp_path):
    g = sample_gnp(60, 3, 11)
    path = tmp_path / "g.edges"
    write_edge_list(g, str(path))
    back = read_edge_list(str(path))
    assert back == g


def test_edge_list_rejects_bad_lines(tmp_path):
    p = tmp_path / "bad.edges"
    p.write_text("0 1\n1 1\n")
    with pytest.raises(InvalidParameterError):
        read_edge_list(str(p))
    p.write_text("0 1\n0 1\n")
    with pytest.raises(InvalidParameterError):
        read_edge_list(str(p))


def test_seed_streams_independent():
    s = Seed(5)
    assert s.child(0) != s.child(1)
    assert s.child(0) == Seed(5).child(0)
    assert s.child("a", 1) == Seed(5).child("a", 1)
    g1 = s.generator("x").random(3)
    g2 = Seed(5).generator("x").random(3)
    assert np.allclose(g1, g2)
