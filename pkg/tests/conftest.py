import numpy as np
import pytest

from longcycle import Graph, Seed, sample_gnp


@pytest.fixture(scope="session")
def small_corpus():
    """2000 seeded graphs with n in [6, 14] and c in {2, 3, 4, 5}; the shared
    corpus for the exact small-scale checks."""
    configs = [(n, c) for n in range(6, 15) for c in (2, 3, 4, 5)]
    base = Seed(20260810)
    out = []
    for i in range(2000):
        n, c = configs[i % len(configs)]
        out.append((i, n, c, sample_gnp(n, float(c), base.child(i))))
    return out


def petersen() -> Graph:
    return Graph(
        10,
        [
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
        ],
    )


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
