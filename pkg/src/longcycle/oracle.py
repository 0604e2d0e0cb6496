"""Independent exact solvers for small instances.

These are deliberately simple and slow: bitmask dynamic programs and
exhaustive enumerations used as ground truth by the test suite.  They share
no code with the production solvers they check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, SizeCapError
from .graph import Graph, components, induced_subgraph
from .strongcore import BLUE, RED

__all__ = [
    "SpectrumReport",
    "brute_longest_cycle",
    "brute_longest_cycle_dfs",
    "brute_longest_path",
    "brute_phi",
    "count_cycles",
    "cycle_spectrum",
]

DEFAULT_CAP = 18
COUNT_LENGTH_CAP = 8


@dataclass(frozen=True)
class SpectrumReport:
    """Exact cycle counts for short lengths and presence flags up to n."""

    n: int
    counts: dict = field(default_factory=dict)  # length -> exact count
    present: frozenset = frozenset()  # all lengths with >= 1 cycle

    def has_cycle(self, length: int) -> bool:
        return length in self.present


def _component_adj_masks(g: Graph, cell):
    local = {v: i for i, v in enumerate(cell)}
    masks = [0] * len(cell)
    for v in cell:
        for w in g.adj[v]:
            if w in local:
                masks[local[v]] |= 1 << local[w]
    return masks


def _component_cycle_lengths(masks) -> set:
    """All cycle lengths realized inside one component (bitmask DP).

    Paths are anchored at their minimum vertex; dp maps a vertex mask to the
    bitset of reachable endpoints.
    """
    k = len(masks)
    lengths: set = set()
    for a in range(k):
        above = ~((1 << (a + 1)) - 1)
        start_nbrs = masks[a] & above
        if not start_nbrs:
            continue
        abit = 1 << a
        layer = {}
        mm = start_nbrs
        while mm:
            v = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            layer.setdefault(abit | (1 << v), 0)
            layer[abit | (1 << v)] |= 1 << v
        size = 2
        while layer:
            nxt = {}
            for mask, ends in layer.items():
                em = ends
                while em:
                    v = (em & -em).bit_length() - 1
                    em &= em - 1
                    if size >= 3 and (masks[v] & abit):
                        lengths.add(size)
                    new = masks[v] & above & ~mask
                    wm = new
                    while wm:
                        w = (wm & -wm).bit_length() - 1
                        wm &= wm - 1
                        key = mask | (1 << w)
                        nxt[key] = nxt.get(key, 0) | (1 << w)
            layer = nxt
            size += 1
    return lengths


def brute_longest_cycle(g: Graph, cap: int = DEFAULT_CAP) -> int:
    """Exact longest cycle length, 0 for acyclic graphs.  n <= cap."""
    if g.n > cap:
        raise SizeCapError(f"brute longest cycle capped at {cap} vertices, got {g.n}")
    best = 0
    for cell in components(g):
        if len(cell) < 3:
            continue
        lengths = _component_cycle_lengths(_component_adj_masks(g, cell))
        if lengths:
            best = max(best, max(lengths))
    return best


def brute_longest_cycle_dfs(g: Graph, cap: int = DEFAULT_CAP) -> int:
    """Second opinion on the longest cycle: plain DFS path enumeration from
    each anchor, no bitmask DP."""
    if g.n > cap:
        raise SizeCapError(f"brute longest cycle capped at {cap} vertices, got {g.n}")
    adj = g.adj
    best = 0

    def dfs(anchor, v, visited, depth):
        nonlocal best
        for w in adj[v]:
            if w < anchor:
                continue
            if w == anchor:
                if depth >= 3:
                    best = max(best, depth)
                continue
            if w in visited:
                continue
            visited.add(w)
            dfs(anchor, w, visited, depth + 1)
            visited.remove(w)

    for a in range(g.n):
        dfs(a, a, {a}, 1)
    return best


def brute_longest_path(g: Graph, cap: int = DEFAULT_CAP) -> int:
    """Exact longest path length in edges (0 for empty graphs)."""
    if g.n > cap:
        raise SizeCapError(f"brute longest path capped at {cap} vertices, got {g.n}")
    best = 0
    for cell in components(g):
        k = len(cell)
        if k == 1:
            continue
        masks = _component_adj_masks(g, cell)
        layer = {1 << v: 1 << v for v in range(k)}
        size = 1
        while layer:
            best = max(best, size - 1)
            nxt = {}
            for mask, ends in layer.items():
                em = ends
                while em:
                    v = (em & -em).bit_length() - 1
                    em &= em - 1
                    new = masks[v] & ~mask
                    wm = new
                    while wm:
                        w = (wm & -wm).bit_length() - 1
                        wm &= wm - 1
                        key = mask | (1 << w)
                        nxt[key] = nxt.get(key, 0) | (1 << w)
            layer = nxt
            size += 1
    return best


def brute_phi(comp: Graph, colors, cap: int = 14):
    """Exhaustive minimum-uncovered-red computation for one component.

    Enumerates subsets of the component's edges (with degree/acyclicity
    pruning), keeps those forming vertex-disjoint paths whose endpoints are
    all blue, and returns (phi, best_singles): the minimum number of red
    vertices left uncovered, and the maximum number of single-red paths
    among covers attaining it.  Strategy is independent of the production
    solver (edge subsets here, vertex branching there).
    """
    n = comp.n
    if n > cap:
        raise SizeCapError(f"brute phi capped at {cap} vertices, got {n}")
    colors = np.asarray(colors)
    edges = comp.edges()
    m = len(edges)
    nred = int(np.count_nonzero(colors[:n] == RED))
    if nred == 0:
        return 0, 0
    best_covered = 0
    best_singles = 0

    deg = [0] * n
    parent = list(range(n))

    def find(x, par):
        while par[x] != x:
            x = par[x]
        return x

    def evaluate(chosen):
        nonlocal best_covered, best_singles
        if not chosen:
            return
        d = [0] * n
        for (u, v) in chosen:
            d[u] += 1
            d[v] += 1
        for v in range(n):
            if d[v] == 1 and colors[v] != BLUE:
                return
        # group edges into paths, count reds per path
        par = list(range(n))

        def f(x):
            while par[x] != x:
                par[x] = par[par[x]]
                x = par[x]
            return x

        for (u, v) in chosen:
            par[f(u)] = f(v)
        reds_per = {}
        for v in range(n):
            if d[v] > 0 and colors[v] == RED:
                r = f(v)
                reds_per[r] = reds_per.get(r, 0) + 1
        covered = sum(reds_per.values())
        roots = {f(u) for (u, _) in chosen}
        singles = sum(1 for r in roots if reds_per.get(r, 0) == 1)
        if covered > best_covered:
            best_covered, best_singles = covered, singles
        elif covered == best_covered and singles > best_singles:
            best_singles = singles

    def rec(idx, chosen, par):
        if idx == m:
            evaluate(chosen)
            return
        # skip edge idx
        rec(idx + 1, chosen, par)
        u, v = edges[idx]
        if deg[u] >= 2 or deg[v] >= 2:
            return
        ru, rv = find(u, par), find(v, par)
        if ru == rv:
            return  # would close a cycle
        par2 = list(par)
        par2[ru] = rv
        deg[u] += 1
        deg[v] += 1
        chosen.append((u, v))
        rec(idx + 1, chosen, par2)
        chosen.pop()
        deg[u] -= 1
        deg[v] -= 1

    rec(0, [], parent)
    return nred - best_covered, best_singles


def count_cycles(g: Graph, length: int) -> int:
    """Exact number of distinct cycles of the given length.

    Each cycle is counted once: enumeration anchors at the cycle's smallest
    vertex and fixes the traversal direction by requiring the second vertex
    to be smaller than the last.
    """
    if length < 3:
        raise InvalidParameterError("cycles have length at least 3")
    if length > COUNT_LENGTH_CAP:
        raise SizeCapError(
            f"exact cycle counting capped at length {COUNT_LENGTH_CAP}, got {length}"
        )
    adj = g.adj
    total = 0

    def dfs(anchor, v, visited, depth, first_step):
        nonlocal total
        if depth == length:
            if anchor in adj_sets[v] and first_step < v:
                total += 1
            return
        for w in adj[v]:
            if w <= anchor or w in visited:
                continue
            visited.add(w)
            dfs(anchor, w, visited, depth + 1, first_step if depth > 1 else w)
            visited.remove(w)

    adj_sets = [set(a) for a in adj]
    for a in range(g.n):
        dfs(a, a, {a}, 1, -1)
    return total


def cycle_spectrum(g: Graph, cap: int = DEFAULT_CAP) -> SpectrumReport:
    """Presence flags for every cycle length (via the longest-cycle DP) and
    exact counts for lengths up to the counting cap."""
    if g.n > cap:
        raise SizeCapError(f"spectrum capped at {cap} vertices, got {g.n}")
    present: set = set()
    for cell in components(g):
        if len(cell) >= 3:
            present |= _component_cycle_lengths(_component_adj_masks(g, cell))
    counts = {
        length: count_cycles(g, length)
        for length in range(3, min(g.n, COUNT_LENGTH_CAP) + 1)
    }
    return SpectrumReport(n=g.n, counts=counts, present=frozenset(present))
