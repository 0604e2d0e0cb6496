import numpy as np
import pytest

from longcycle import (
    Graph,
    InvalidParameterError,
    Seed,
    matching_number_brute,
    maximum_matching,
    maximum_matching_mates,
    odd_components,
    sample_gnp,
    tutte_berge_witness,
)

from conftest import complete_graph, cycle_graph


def test_even_cycle():
    assert len(maximum_matching(cycle_graph(6))) == 3


def test_k4_with_forbidden_edge():
    assert len(maximum_matching(complete_graph(4), forbidden=[(0, 1)])) == 2


def test_forbidden_must_be_edges():
    with pytest.raises(InvalidParameterError):
        maximum_matching(cycle_graph(4), forbidden=[(0, 2)])


def test_blossom_structures():
    # triangle with a tail: needs an odd-cycle contraction
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])
    assert len(maximum_matching(g)) == 2
    # petersen
    from conftest import petersen

    assert len(maximum_matching(petersen())) == 5
    # two odd cliques joined by one edge
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    edges += [(5 + i, 5 + j) for i in range(5) for j in range(i + 1, 5)]
    edges += [(4, 5)]
    g = Graph(10, edges)
    assert len(maximum_matching(g)) == 5


def test_brute_force_agreement():
    base = Seed(50)
    for t in range(500):
        n = 4 + t % 9
        g = sample_gnp(n, min(2.0 + (t % 7) * 0.5, float(n)), base.child(t))
        assert len(maximum_matching(g)) == matching_number_brute(g)


def test_tutte_berge_witness():
    base = Seed(51)
    for t in range(100):
        n = 5 + t % 8
        g = sample_gnp(n, min(2.5 + (t % 5) * 0.5, float(n)), base.child(t))
        size = len(maximum_matching(g))
        u = tutte_berge_witness(g, size)
        assert u is not None
        assert len(u) - odd_components(g, u) + g.n == 2 * size


def test_matching_is_valid():
    g = sample_gnp(500, 5, 3)
    mm = maximum_matching(g)
    seen = set()
    for u, v in mm:
        assert g.has_edge(u, v)
        assert u not in seen and v not in seen
        seen.add(u)
        seen.add(v)


def test_warm_start_preserves_maximality():
    g = sample_gnp(2000, 8, 9)
    mate = maximum_matching_mates(g)
    size = int((mate >= 0).sum() // 2)
    # forbid a chunk of the matched edges and warm start
    forbidden = [(v, int(mate[v])) for v in range(0, 2000, 7) if mate[v] > v][:40]
    warm = maximum_matching_mates(g, forbidden=forbidden, mate_init=mate)
    cold = maximum_matching_mates(g, forbidden=forbidden)
    assert int((warm >= 0).sum() // 2) == int((cold >= 0).sum() // 2) <= size


def test_determinism():
    g = sample_gnp(300, 6, 4)
    assert maximum_matching(g) == maximum_matching(g)
