"""Maximum-cardinality matching in general graphs.

A degree-aware greedy pass seeds the matching, then alternating-tree search
with blossom contraction augments it to true maximality.  The greedy pass
matches degree-1 vertices eagerly (their edge is always safe to take up to
exchange arguments) and otherwise grabs an edge at the currently sparsest
vertex, which leaves very few augmentations to do on sparse random graphs.

``tutte_berge_witness`` exhibits, for small graphs, a vertex set U attaining
the matching-number formula  0.5 * min_U (|U| - odd(G - U) + |V|).
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

from .errors import InvalidParameterError, SizeCapError
from .graph import Graph

__all__ = [
    "maximum_matching",
    "maximum_matching_mates",
    "matching_number_brute",
    "tutte_berge_witness",
    "odd_components",
]


def _greedy_seed(n, adj, mate):
    deg = [0] * n
    for v in range(n):
        if mate[v] == -1:
            deg[v] = sum(1 for w in adj[v] if mate[w] == -1)
    heap = [(deg[v], v) for v in range(n) if mate[v] == -1 and deg[v] > 0]
    heapq.heapify(heap)
    q = deque(v for v in range(n) if mate[v] == -1 and deg[v] == 1)

    def take(v):
        best = -1
        for w in adj[v]:
            if mate[w] == -1 and w != v and (best == -1 or deg[w] < deg[best] or (deg[w] == deg[best] and w < best)):
                best = w
        if best == -1:
            return
        mate[v], mate[best] = best, v
        for x in (v, best):
            for w in adj[x]:
                if mate[w] == -1:
                    deg[w] -= 1
                    if deg[w] == 1:
                        q.append(w)
                    heapq.heappush(heap, (deg[w], w))

    while q or heap:
        while q:
            v = q.popleft()
            if mate[v] == -1 and deg[v] >= 1:
                take(v)
        if heap:
            d, v = heapq.heappop(heap)
            if mate[v] != -1 or deg[v] != d or d <= 0:
                continue
            take(v)


def _augment(n, adj, mate, root):
    """One alternating-tree search with blossom contraction from ``root``.
    Returns True and flips the matching along an augmenting path if one
    exists; otherwise leaves the matching unchanged.

    Blossom bases live in a union-find structure and contractions touch only
    the vertices on the two stem paths, so a full (failed) search costs about
    O(m alpha) rather than O(n) per contraction."""
    p = [-1] * n
    base_parent = list(range(n))
    used = [False] * n
    used[root] = True
    q = deque([root])
    lca_stamp = [0] * n
    stamp = 0

    def find(x):
        r = x
        while base_parent[r] != r:
            r = base_parent[r]
        while base_parent[x] != r:
            base_parent[x], x = r, base_parent[x]
        return r

    def lca(a, b):
        nonlocal stamp
        stamp += 1
        a, b = find(a), find(b)
        # walk the two stems alternately until they meet
        while True:
            if a != -1:
                if lca_stamp[a] == stamp:
                    return a
                lca_stamp[a] = stamp
                if mate[a] == -1:
                    a = -1
                else:
                    a = find(p[mate[a]])
            a, b = b, a

    def mark_path(v, b, child):
        while find(v) != b:
            bv = find(v)
            mv = mate[v]
            bm = find(mv)
            p[v] = child
            child = mv
            if not used[mv]:
                used[mv] = True
                q.append(mv)
            base_parent[bv] = b
            base_parent[bm] = b
            v = p[mv]

    while q:
        v = q.popleft()
        for to in adj[v]:
            if find(v) == find(to) or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and p[mate[to]] != -1):
                cur = lca(v, to)
                mark_path(v, cur, to)
                mark_path(to, cur, v)
            elif p[to] == -1:
                p[to] = v
                if mate[to] == -1:
                    while to != -1:
                        prev = p[to]
                        nxt = mate[prev]
                        mate[to] = prev
                        mate[prev] = to
                        to = nxt
                    return True
                used[mate[to]] = True
                q.append(mate[to])
    return False


def _build_adj(g: Graph, forb):
    if not forb:
        return g.adj
    for (u, v) in forb:
        if (u, v) not in g.edge_set:
            raise InvalidParameterError(f"forbidden pair {(u, v)} is not an edge")
    adj = list(g.adj)  # copy-on-write: only rows touching forbidden pairs change
    drop = {}
    for (u, v) in forb:
        drop.setdefault(u, set()).add(v)
        drop.setdefault(v, set()).add(u)
    for v, gone in drop.items():
        adj[v] = [w for w in adj[v] if w not in gone]
    return adj


def maximum_matching_mates(
    g: Graph, forbidden=(), mate_init=None
) -> np.ndarray:
    """Maximum matching of g minus the forbidden edges, as a mate array
    (mate[v] = partner or -1).  ``mate_init`` warm-starts from a previous
    matching; pairs that are no longer allowed edges are dropped first."""
    n = g.n
    forb = {(min(u, v), max(u, v)) for (u, v) in forbidden}
    adj = _build_adj(g, forb)
    mate = [-1] * n
    if mate_init is not None:
        eset = g.edge_set
        for v in range(n):
            w = int(mate_init[v])
            if w > v and (v, w) in eset and (v, w) not in forb:
                mate[v], mate[w] = w, v
    _greedy_seed(n, adj, mate)
    for v in range(n):
        if mate[v] == -1 and adj[v]:
            _augment(n, adj, mate, v)
    return np.asarray(mate, dtype=np.int64)


def maximum_matching(g: Graph, forbidden=()) -> list:
    """Maximum-cardinality matching as a sorted list of (u, v) pairs."""
    mate = maximum_matching_mates(g, forbidden)
    return sorted(
        (v, int(mate[v])) for v in range(g.n) if mate[v] > v
    )


def matching_number_brute(g: Graph, cap: int = 14) -> int:
    """Exhaustive maximum matching size (test oracle)."""
    if g.n > cap:
        raise SizeCapError(f"brute matching capped at {cap} vertices")
    edges = g.edges()

    def rec(idx, used_mask):
        if idx == len(edges):
            return 0
        best = rec(idx + 1, used_mask)
        u, v = edges[idx]
        if not (used_mask >> u & 1) and not (used_mask >> v & 1):
            best = max(best, 1 + rec(idx + 1, used_mask | (1 << u) | (1 << v)))
        return best

    return rec(0, 0)


def odd_components(g: Graph, u_set) -> int:
    """Number of odd-order components of g with u_set removed."""
    removed = set(u_set)
    seen = set(removed)
    adj = g.adj
    odd = 0
    for s in range(g.n):
        if s in seen:
            continue
        size = 0
        stack = [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            size += 1
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if size % 2 == 1:
            odd += 1
    return odd


def tutte_berge_witness(g: Graph, matching_size: int, cap: int = 16):
    """A set U with matching_size == (|U| - odd(G-U) + n) / 2, found by
    exhaustive search over subsets (small graphs only)."""
    n = g.n
    if n > cap:
        raise SizeCapError(f"witness search capped at {cap} vertices")
    target = 2 * matching_size
    for mask in range(1 << n):
        u_set = [v for v in range(n) if mask >> v & 1]
        if len(u_set) - odd_components(g, u_set) + n == target:
            return u_set
    return None
