"""Strong k-core decomposition via red/blue/black peeling.

The strong k-core of a graph is the maximal vertex set S such that every
vertex of S and of its neighborhood has at least k neighbors inside S.  The
peeling procedure colors every vertex black, then repeatedly picks a black or
blue vertex with fewer than k black neighbors, colors it red, and colors its
black neighbors blue.  The terminal coloring is independent of the processing
order: black is exactly the strong k-core, blue is its outside neighborhood,
red is everything else, and no red-black edge exists.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .graph import Graph, components, induced_subgraph

__all__ = [
    "BLACK",
    "BLUE",
    "RED",
    "Coloring",
    "RBStats",
    "strong_core_coloring",
    "verify_strong_core",
    "rb_subgraph",
    "component_stats",
    "check_red_fraction",
]

BLACK, BLUE, RED = 0, 1, 2
_COLOR_NAMES = {BLACK: "black", BLUE: "blue", RED: "red"}


@dataclass(frozen=True)
class Coloring:
    """Terminal red/blue/black labeling for a given core parameter k."""

    k: int
    colors: np.ndarray  # uint8 per vertex: BLACK/BLUE/RED

    def __post_init__(self):
        self.colors.setflags(write=False)

    @property
    def n(self) -> int:
        return self.colors.shape[0]

    def vertex_set(self, color: int) -> np.ndarray:
        return np.flatnonzero(self.colors == color)

    @property
    def black(self) -> np.ndarray:
        return self.vertex_set(BLACK)

    @property
    def blue(self) -> np.ndarray:
        return self.vertex_set(BLUE)

    @property
    def red(self) -> np.ndarray:
        return self.vertex_set(RED)

    def histogram(self) -> dict:
        return {
            _COLOR_NAMES[c]: int(np.count_nonzero(self.colors == c))
            for c in (BLACK, BLUE, RED)
        }


@dataclass(frozen=True)
class RBStats:
    """Component statistics of the subgraph induced by red and blue vertices.

    x[i] counts vertices lying in components of size i; y[i] counts red
    vertices lying in components with exactly i red vertices; y_multi is the
    number of red vertices in components with at least 2 reds; largest is the
    size of the largest component (0 if there are none).
    """

    x: dict = field(default_factory=dict)
    y: dict = field(default_factory=dict)
    y_multi: int = 0
    largest: int = 0


def _coloring_rounds(g: Graph, k: int) -> np.ndarray:
    """Round-based peeling: all currently violating vertices are processed
    in one sweep.  Equivalent to any sequential order (the black set is the
    same by the union property, and blue/red assignments are forced by it).
    """
    n = g.n
    colors = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return colors
    black_deg = g.degrees.astype(np.int64).copy()
    arr = g.edge_array
    candidates = np.arange(n)
    while candidates.size:
        cand_mask = (colors[candidates] != RED) & (black_deg[candidates] < k)
        newly_red = candidates[cand_mask]
        if newly_red.size == 0:
            break
        was_black = colors[newly_red] == BLACK
        colors[newly_red] = RED
        # black neighbors of the new reds turn blue
        red_mark = np.zeros(n, dtype=bool)
        red_mark[newly_red] = True
        if arr.shape[0]:
            e0, e1 = arr[:, 0], arr[:, 1]
            hit0 = red_mark[e1] & (colors[e0] == BLACK)
            hit1 = red_mark[e0] & (colors[e1] == BLACK)
            newly_blue = np.unique(np.concatenate([e0[hit0], e1[hit1]]))
        else:
            newly_blue = np.empty(0, dtype=np.int64)
        colors[newly_blue] = BLUE
        # vertices that just left black decrement their neighbors' counters
        left_black = np.concatenate([newly_red[was_black], newly_blue])
        if left_black.size and arr.shape[0]:
            left_mark = np.zeros(n, dtype=bool)
            left_mark[left_black] = True
            e0, e1 = arr[:, 0], arr[:, 1]
            dec0 = e0[left_mark[e1]]
            dec1 = e1[left_mark[e0]]
            touched = np.concatenate([dec0, dec1])
            np.subtract.at(black_deg, touched, 1)
            candidates = np.unique(touched)
        else:
            candidates = np.empty(0, dtype=np.int64)
    return colors


def _coloring_sequential(g: Graph, k: int, order) -> np.ndarray:
    """One-vertex-at-a-time peeling; ``order[v]`` ranks which violating
    vertex to process next (lowest rank first).  Used to demonstrate order
    independence; O((n+m) log n)."""
    n = g.n
    rank = list(order)
    if len(rank) != n:
        raise InvalidParameterError("order must rank every vertex")
    colors = np.zeros(n, dtype=np.uint8)
    black_deg = [len(nb) for nb in g.adj]
    adj = g.adj
    heap = [(rank[v], v) for v in range(n) if black_deg[v] < k]
    heapq.heapify(heap)
    while heap:
        _, v = heapq.heappop(heap)
        if colors[v] == RED or black_deg[v] >= k:
            continue
        was_black = colors[v] == BLACK
        colors[v] = RED
        turned_blue = [u for u in adj[v] if colors[u] == BLACK]
        for u in turned_blue:
            colors[u] = BLUE
        left_black = turned_blue + [v] if was_black else turned_blue
        for u in left_black:
            for w in adj[u]:
                black_deg[w] -= 1
                if colors[w] != RED and black_deg[w] < k:
                    heapq.heappush(heap, (rank[w], w))
    return colors


def strong_core_coloring(g: Graph, k: int = 4, order=None) -> Coloring:
    """Run the peeling procedure to its unique fixpoint.

    The black set is the strong k-core; the result does not depend on the
    processing order.  Passing ``order`` forces a specific sequential
    schedule (by vertex rank); the default uses a fast batched sweep.
    """
    if k < 1:
        raise InvalidParameterError("k must be at least 1")
    colors = (
        _coloring_rounds(g, k) if order is None else _coloring_sequential(g, k, order)
    )
    return Coloring(k=k, colors=colors)


def verify_strong_core(g: Graph, s, k: int) -> bool:
    """True iff every vertex of S and of N(S) has at least k neighbors in S."""
    mark = np.zeros(g.n, dtype=bool)
    s_idx = np.asarray(sorted(set(int(v) for v in s)), dtype=np.int64)
    if s_idx.size == 0:
        return True
    if s_idx[0] < 0 or s_idx[-1] >= g.n:
        raise InvalidParameterError("vertex out of range")
    mark[s_idx] = True
    in_s_deg = np.zeros(g.n, dtype=np.int64)
    arr = g.edge_array
    if arr.shape[0]:
        e0, e1 = arr[:, 0], arr[:, 1]
        np.add.at(in_s_deg, e0, mark[e1].astype(np.int64))
        np.add.at(in_s_deg, e1, mark[e0].astype(np.int64))
    closed = mark.copy()
    if arr.shape[0]:
        closed[e0[mark[e1]]] = True
        closed[e1[mark[e0]]] = True
    return bool(np.all(in_s_deg[closed] >= k))


def rb_subgraph(g: Graph, col: Coloring):
    """Subgraph induced by the red and blue vertices, plus its components.

    Returns (subgraph, index_map, comps) where index_map maps subgraph ids
    back to g and comps lists components in original vertex ids.
    """
    rb = np.flatnonzero(col.colors != BLACK)
    sub, idx = induced_subgraph(g, rb)
    comps_local = components(sub)
    comps = [[int(idx[v]) for v in cell] for cell in comps_local]
    return sub, idx, comps


def component_stats(g: Graph, col: Coloring) -> RBStats:
    """Exact component-size and red-multiplicity counts for the r/b subgraph."""
    _, idx, comps = rb_subgraph(g, col)
    x: dict = {}
    y: dict = {}
    y_multi = 0
    largest = 0
    colors = col.colors
    for cell in comps:
        size = len(cell)
        largest = max(largest, size)
        x[size] = x.get(size, 0) + size
        nred = sum(1 for v in cell if colors[v] == RED)
        if nred:
            y[nred] = y.get(nred, 0) + nred
            if nred >= 2:
                y_multi += nred
    return RBStats(x=x, y=y, y_multi=y_multi, largest=largest)


def check_red_fraction(g: Graph, col: Coloring) -> bool:
    """Every r/b component must contain at least a quarter red vertices
    (each peeling step blues at most k-1 = 3 vertices per new red)."""
    _, _, comps = rb_subgraph(g, col)
    colors = col.colors
    for cell in comps:
        nred = sum(1 for v in cell if colors[v] == RED)
        if 4 * nred < len(cell):
            return False
    return True
