"""Immutable simple graphs, seeded sparse random-graph sampling, and basic
structural queries (components, induced subgraphs, degree profiles).

Vertices are always 0..n-1.  Edges are unordered pairs stored canonically as
(u, v) with u < v.  Graph objects are immutable after construction and safe
to share; anything that looks like mutation returns a new Graph.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "Seed",
    "Graph",
    "sample_gnp",
    "components",
    "induced_subgraph",
    "degree_profile",
    "read_edge_list",
    "write_edge_list",
]


def _encode_stream_part(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    raise InvalidParameterError(f"seed stream parts must be int or str, got {part!r}")


@dataclass(frozen=True)
class Seed:
    """A 64-bit master seed plus a derivation rule for substreams.

    ``child(*path)`` derives a new Seed deterministically from the master and
    the path elements (ints or short strings), so parallel trials can use
    streams derived as child(trial_index) without coordination.  Identical
    (master, path) always reproduces identical random bits.
    """

    master: int

    def __post_init__(self):
        if not (0 <= int(self.master) < 2**64):
            raise InvalidParameterError("seed master must fit in 64 bits")

    def _sequence(self, path) -> np.random.SeedSequence:
        entropy = [int(self.master)] + [_encode_stream_part(p) for p in path]
        return np.random.SeedSequence(entropy)

    def child(self, *path) -> "Seed":
        state = self._sequence(path).generate_state(2, np.uint32)
        return Seed((int(state[0]) << 32) | int(state[1]))

    def generator(self, *path) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self._sequence(path)))


def as_seed(seed) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(int(seed))


class Graph:
    """Immutable simple undirected graph.

    Invariants (checked on construction unless the caller passes canonical
    data): no self-loops, no duplicate edges, all endpoints in [0, n).
    """

    __slots__ = ("n", "edge_array", "_adj", "_edge_set", "_degrees")

    def __init__(self, n: int, edges, *, _canonical: bool = False):
        if n < 0:
            raise InvalidParameterError("vertex count must be nonnegative")
        self.n = int(n)
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InvalidParameterError("edges must be an (m, 2) array of pairs")
        if not _canonical:
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise InvalidParameterError("edge endpoint out of range")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise InvalidParameterError("self-loops are not allowed")
            lo = np.minimum(arr[:, 0], arr[:, 1])
            hi = np.maximum(arr[:, 0], arr[:, 1])
            arr = np.stack([lo, hi], axis=1)
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            arr = arr[order]
            if arr.shape[0] > 1:
                dup = np.all(arr[1:] == arr[:-1], axis=1)
                if np.any(dup):
                    raise InvalidParameterError("duplicate edges are not allowed")
        arr.setflags(write=False)
        self.edge_array = arr
        self._adj = None
        self._edge_set = None
        self._degrees = None

    @property
    def m(self) -> int:
        return self.edge_array.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            deg = np.bincount(self.edge_array.ravel(), minlength=self.n)
            deg.setflags(write=False)
            self._degrees = deg
        return self._degrees

    @property
    def adj(self) -> list:
        """Sorted neighbor lists (plain Python ints, fast to iterate)."""
        if self._adj is None:
            n, arr = self.n, self.edge_array
            if arr.shape[0] == 0:
                self._adj = [[] for _ in range(n)]
            else:
                src = np.concatenate([arr[:, 0], arr[:, 1]])
                dst = np.concatenate([arr[:, 1], arr[:, 0]])
                order = np.lexsort((dst, src))
                src, dst = src[order], dst[order]
                counts = np.bincount(src, minlength=n)
                offsets = np.concatenate([[0], np.cumsum(counts)])
                flat = dst.tolist()
                self._adj = [
                    flat[offsets[v] : offsets[v + 1]] for v in range(n)
                ]
        return self._adj

    @property
    def edge_set(self) -> frozenset:
        if self._edge_set is None:
            self._edge_set = frozenset(map(tuple, self.edge_array.tolist()))
        return self._edge_set

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edge_set

    def edges(self):
        """Edges as a list of (u, v) tuples with u < v, lexicographic order."""
        return list(map(tuple, self.edge_array.tolist()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edge_array.shape == other.edge_array.shape
            and bool(np.all(self.edge_array == other.edge_array))
        )

    def __hash__(self):
        return hash((self.n, self.edge_array.tobytes()))


def _decode_pair_indices(t: np.ndarray, n: int):
    """Map linear indices over the C(n,2) pairs (lexicographic) to (u, v)."""
    # S(u) = u*(2n-u-1)/2 pairs have first coordinate < u; invert the quadratic.
    tf = t.astype(np.float64)
    u = np.floor(((2 * n - 1) - np.sqrt((2 * n - 1) ** 2 - 8 * tf)) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    s = u * (2 * n - u - 1) // 2
    too_big = s > t
    while np.any(too_big):
        u[too_big] -= 1
        s = u * (2 * n - u - 1) // 2
        too_big = s > t
    s_next = (u + 1) * (2 * n - u - 2) // 2
    too_small = s_next <= t
    while np.any(too_small):
        u[too_small] += 1
        s_next = (u + 1) * (2 * n - u - 2) // 2
        too_small = s_next <= t
        s = u * (2 * n - u - 1) // 2
    v = t - s + u + 1
    return u, v


def sample_gnp(n: int, c: float, seed) -> Graph:
    """Sample a binomial random graph on n vertices with edge probability c/n.

    Each of the C(n,2) pairs is included independently with probability c/n
    under the seeded generator; the result is deterministic for fixed
    (n, c, seed).  Sampling runs in O(m) expected time via geometric skips
    over the lexicographic pair ordering.
    """
    if n < 0:
        raise InvalidParameterError("n must be nonnegative")
    if c < 0 or c > n:
        raise InvalidParameterError(f"need 0 <= c <= n so that p = c/n is a probability, got c={c}, n={n}")
    if n < 2:
        return Graph(n, [], _canonical=True)
    p = c / n
    total = n * (n - 1) // 2
    if p == 0:
        return Graph(n, [], _canonical=True)
    if p >= 1:
        u, v = np.triu_indices(n, k=1)
        arr = np.stack([u, v], axis=1).astype(np.int64)
        order = np.lexsort((arr[:, 1], arr[:, 0]))
        return Graph(n, arr[order], _canonical=True)
    gen = as_seed(seed).generator("gnp")
    batch = max(1024, int(total * p * 1.1) + 16)
    taken = []
    t = -1
    while True:
        skips = gen.geometric(p, size=batch)
        idx = t + np.cumsum(skips)
        if idx[-1] >= total:
            taken.append(idx[idx < total])
            break
        taken.append(idx)
        t = int(idx[-1])
    lin = np.concatenate(taken) if taken else np.empty(0, dtype=np.int64)
    u, v = _decode_pair_indices(lin, n)
    arr = np.stack([u, v], axis=1)
    return Graph(n, arr, _canonical=True)


def components(g: Graph) -> list:
    """Connected components as sorted vertex lists, ordered by smallest member."""
    n = g.n
    comp = np.full(n, -1, dtype=np.int64)
    adj = g.adj
    cells = []
    for start in range(n):
        if comp[start] >= 0:
            continue
        cid = len(cells)
        comp[start] = cid
        stack = [start]
        cell = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if comp[w] < 0:
                    comp[w] = cid
                    stack.append(w)
                    cell.append(w)
        cell.sort()
        cells.append(cell)
    return cells


def induced_subgraph(g: Graph, vertices) -> tuple:
    """Subgraph induced by ``vertices``.

    Returns (subgraph, index_map) where index_map[i] is the original id of
    subgraph vertex i; vertices are relabeled 0..k-1 in sorted order.
    """
    idx = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= g.n):
        raise InvalidParameterError("vertex out of range")
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[idx] = np.arange(idx.size)
    arr = g.edge_array
    if arr.shape[0]:
        keep = (remap[arr[:, 0]] >= 0) & (remap[arr[:, 1]] >= 0)
        sub_edges = np.stack([remap[arr[keep, 0]], remap[arr[keep, 1]]], axis=1)
    else:
        sub_edges = np.empty((0, 2), dtype=np.int64)
    return Graph(int(idx.size), sub_edges, _canonical=True), idx


def degree_profile(g: Graph) -> list:
    """counts[d] = number of vertices of degree d; the counts sum to n."""
    if g.n == 0:
        return []
    return np.bincount(g.degrees).tolist()


def write_edge_list(g: Graph, path: str) -> None:
    """One ``u v`` pair per line, 0-indexed, whitespace-separated."""
    with open(path, "w") as fh:
        for u, v in g.edge_array.tolist():
            fh.write(f"{u} {v}\n")


def read_edge_list(path: str, n: int | None = None) -> Graph:
    """Parse the edge-list format written by write_edge_list.

    Duplicate and self-loop lines are rejected.  If ``n`` is not given the
    vertex count is max id + 1 (the format cannot express trailing isolated
    vertices).
    """
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise InvalidParameterError(f"{path}:{lineno}: expected 'u v', got {stripped!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise InvalidParameterError(f"{path}:{lineno}: non-integer endpoint in {stripped!r}")
            if u == v:
                raise InvalidParameterError(f"{path}:{lineno}: self-loop {u} {v}")
            if u < 0 or v < 0:
                raise InvalidParameterError(f"{path}:{lineno}: negative vertex id")
            pairs.append((u, v))
    if n is None:
        n = 1 + max((max(p) for p in pairs), default=-1)
    return Graph(n, pairs)
