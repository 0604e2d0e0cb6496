"""Constructive longest-cycle pipeline.

Stages, per attempt:

1. Contract the fixed cover paths into forced matching edges between their
   blue endpoints (dropping the first ``deficiency`` single-red paths),
   producing a reduced graph whose Hamilton cycles through all forced edges
   expand to long cycles of the original graph.
2. Split the reduced graph's real edges into a working graph H' and a
   randomized reveal reservoir; every edge flips an independent coin, but
   edges at vertices left with fewer than 4 black neighbors always stay in
   the working graph.
3. Cover V(H') and the forced edges by few vertex-disjoint paths using two
   maximum matchings.
4. Chain the paths with virtual connector edges and merge them into one
   Hamilton cycle by endpoint rotations: a rotation may insert only working
   edges and never deletes a forced edge.  Connectors are bookkeeping only;
   the final cycle contains none and uses only working edges, forced edges,
   and revealed reservoir edges (consumed strictly in reveal order).

Rotations are explored breadth-first with endpoint deduplication.  Each
rotation reverses a suffix of the path, so a derived path is represented by
its pivot chain: the position of any vertex is the composition of at most
depth-many piecewise reflections applied to the base position.  Adopting a
derived path materializes it once with vectorized suffix reversals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InternalInvariantError,
    InvalidParameterError,
    UnsupportedRegimeError,
)
from .graph import Graph, as_seed, induced_subgraph
from .matching import maximum_matching_mates
from .pathcover import (
    CoverFamily,
    build_cover_family,
    extract_singles,
    longest_cycle_upper_bound,
)
from .strongcore import BLACK, BLUE, Coloring, strong_core_coloring

__all__ = [
    "ContractedInstance",
    "HamiltonInstance",
    "MergeParams",
    "MergeResult",
    "CycleResult",
    "build_gamma",
    "decompose",
    "default_p_prime",
    "cover_paths_via_matchings",
    "posa_merge",
    "longest_cycle",
    "cycle_of_deficiency",
    "deficiency_sweep",
    "LongestCyclePipeline",
    "validate_cycle",
]


def _norm(a, b):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ContractedInstance:
    """Reduced graph with forced matching edges standing in for cover paths.

    ``gamma`` holds all real edges spanned by the kept vertices plus the
    forced pairs; ``base`` is the same graph without the forced-only pairs.
    ``expansion`` maps each forced pair (local ids) to the original-id path
    it stands for; ``excluded_interior`` lists original ids hidden inside
    contracted paths.
    """

    gamma: Graph
    base: Graph
    orig_ids: np.ndarray
    forced: tuple
    expansion: dict
    excluded_interior: frozenset
    deficiency: int

    def expand_cycle(self, cycle_local) -> tuple:
        """Replace forced pairs of a reduced-graph cycle by their paths."""
        orig = self.orig_ids
        out = []
        L = len(cycle_local)
        for i in range(L):
            a = cycle_local[i]
            b = cycle_local[(i + 1) % L]
            oa = int(orig[a])
            out.append(oa)
            path = self.expansion.get(_norm(a, b))
            if path is not None:
                if path[0] != oa:
                    path = tuple(reversed(path))
                if path[0] != oa or path[-1] != int(orig[b]):
                    raise InternalInvariantError("expansion path endpoints mismatch")
                out.extend(path[1:-1])
        return tuple(out)


@dataclass
class HamiltonInstance:
    """Decomposition feeding the rotation engine.  ``forced`` and
    ``connectors`` are filled by the caller / the merge step."""

    h_prime: Graph
    reservoir: list
    v1: frozenset
    p_prime: float
    forced: tuple = ()
    connectors: tuple = ()


@dataclass(frozen=True)
class MergeParams:
    """Engine knobs: frontier caps bound per-iteration work on very large
    instances (a cap below the vertex count trades completeness of one
    closure phase for speed; reveals compensate)."""

    end1_cap: int = 60000
    end2_cap: int = 30000
    retries: int = 3


@dataclass
class MergeResult:
    success: bool
    cycle: tuple | None
    iterations: int
    reveals_used: int
    e1_size: int
    frontier_size: int = 0
    reason: str = ""
    trace: list = field(default_factory=list)
    salvage_path: tuple | None = None
    salvage_labels: dict | None = None


@dataclass
class CycleResult:
    """Outcome of the full pipeline on one graph."""

    n: int
    bound: int
    deficiency: int
    success: bool
    achieved: int
    cycle: tuple | None
    retries: int
    reveals_used: int
    diagnostics: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    @property
    def certificate(self) -> dict:
        return {"upper_bound": self.bound, "achieved_length": self.achieved}


def _graph_with_pairs(base: Graph, pairs) -> Graph:
    if not pairs:
        return base
    extra = np.asarray(sorted(pairs), dtype=np.int64)
    arr = np.vstack([base.edge_array, extra])
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    arr = arr[order]
    if arr.shape[0] > 1:
        dup = np.concatenate([[False], np.all(arr[1:] == arr[:-1], axis=1)])
        arr = arr[~dup]
    return Graph(base.n, arr, _canonical=True)


def build_gamma(g: Graph, col: Coloring, fam: CoverFamily, deficiency: int) -> ContractedInstance:
    """Contract the kept cover paths into forced edges.

    The first ``deficiency`` single-red paths (ordered by smallest vertex)
    are dropped from the cover; every kept path becomes one forced edge
    between its endpoints and its interior vertices are excluded.
    """
    singles = extract_singles(fam)
    if not (0 <= deficiency <= len(singles)):
        raise InvalidParameterError(
            f"deficiency must lie in [0, {len(singles)}], got {deficiency}"
        )
    dropped = set(singles[:deficiency])
    kept = [p for p in fam.all_paths() if p not in dropped]
    colors = col.colors
    interior_mask = np.zeros(g.n, dtype=bool)
    for p in kept:
        for v in p[1:-1]:
            interior_mask[v] = True
    keep_vertices = np.flatnonzero(
        (colors == BLACK) | ((colors == BLUE) & ~interior_mask)
    )
    base, orig_ids = induced_subgraph(g, keep_vertices)
    local = {int(o): i for i, o in enumerate(orig_ids)}
    forced = []
    expansion = {}
    ends_seen = set()
    for p in kept:
        a, b = local.get(p[0]), local.get(p[-1])
        if a is None or b is None:
            raise InternalInvariantError("cover path endpoint missing from reduced graph")
        if a in ends_seen or b in ends_seen or a == b:
            raise InternalInvariantError("forced pairs do not form a matching")
        ends_seen.add(a)
        ends_seen.add(b)
        pair = _norm(a, b)
        forced.append(pair)
        expansion[pair] = tuple(p)
    gamma = _graph_with_pairs(base, forced)
    return ContractedInstance(
        gamma=gamma,
        base=base,
        orig_ids=orig_ids,
        forced=tuple(sorted(forced)),
        expansion=expansion,
        excluded_interior=frozenset(int(v) for v in np.flatnonzero(interior_mask)),
        deficiency=deficiency,
    )


def default_p_prime(c: float, n: int) -> float:
    """Reveal-reservoir edge probability, clamped to stay a probability and
    to remain well defined at small sizes."""
    loglog = math.log(max(math.log(max(n, 3)), 1.0))
    return min(0.5, 1.0 / (max(c, 1e-9) * max(loglog, 1.0)))


def decompose(
    h: Graph,
    black_mask,
    seed,
    *,
    c: float | None = None,
    p_prime: float | None = None,
) -> HamiltonInstance:
    """Split h's edges into the working graph H' and the reveal reservoir.

    Every edge draws an independent Bernoulli(p') coin; heads go to the
    reservoir unless the edge touches a vertex with fewer than 4 black
    neighbors among the kept edges (those vertices, v1, keep all their
    edges).  The reservoir comes back in a seeded uniformly random reveal
    order.  ``c`` defaults to the average degree; ``p_prime`` overrides the
    default 1 / (c * log log n) clamp.
    """
    n = h.n
    black_mask = np.asarray(black_mask, dtype=bool)
    if black_mask.shape[0] != n:
        raise InvalidParameterError("black mask must label every vertex of h")
    arr = h.edge_array
    m = arr.shape[0]
    if c is None:
        c = (2.0 * m / n) if n else 1.0
    if p_prime is None:
        p_prime = default_p_prime(c, n)
    gen = as_seed(seed).generator("decompose")
    y = gen.random(m) < p_prime if m else np.zeros(0, dtype=bool)
    if m:
        e0, e1v = arr[:, 0], arr[:, 1]
        keep = ~y
        black_deg = np.zeros(n, dtype=np.int64)
        np.add.at(black_deg, e0[keep], black_mask[e1v[keep]].astype(np.int64))
        np.add.at(black_deg, e1v[keep], black_mask[e0[keep]].astype(np.int64))
        v1_mask = black_deg < 4
        touches_v1 = v1_mask[e0] | v1_mask[e1v]
        keep_mask = keep | touches_v1
        hp_edges = arr[keep_mask]
        res_edges = arr[~keep_mask]
    else:
        v1_mask = np.ones(n, dtype=bool)
        hp_edges = arr
        res_edges = arr[:0]
    order = gen.permutation(res_edges.shape[0])
    reservoir = [tuple(map(int, res_edges[i])) for i in order]
    h_prime = Graph(n, hp_edges, _canonical=True)
    return HamiltonInstance(
        h_prime=h_prime,
        reservoir=reservoir,
        v1=frozenset(np.flatnonzero(v1_mask).tolist()),
        p_prime=float(p_prime),
    )


def _max_matching_on_adj(n, adj, mate_init=None):
    from . import matching as _m

    mate = [-1] * n
    if mate_init is not None:
        for v in range(n):
            w = int(mate_init[v])
            if w > v and w in adj[v]:
                mate[v], mate[w] = w, v
    _m._greedy_seed(n, adj, mate)
    for v in range(n):
        if mate[v] == -1 and adj[v]:
            _m._augment(n, adj, mate, v)
    return mate


def cover_paths_via_matchings(inst: HamiltonInstance, warm=None):
    """Vertex-disjoint paths covering V(H') and every forced edge.

    First a maximum matching avoiding the forced pairs, then a second
    maximum matching on the vertices not already doubly covered, avoiding
    everything taken so far.  Components of the union are paths and cycles;
    every cycle loses its smallest non-forced edge.  Returns
    (paths, (mate1, mate2)); the mate arrays can warm-start later calls.
    """
    hp = inst.h_prime
    n = hp.n
    forced = [_norm(a, b) for (a, b) in inst.forced]
    forced_set = set(forced)
    forbidden1 = [p for p in forced if p in hp.edge_set]
    warm1, warm2 = warm if warm is not None else (None, None)
    mate1 = maximum_matching_mates(hp, forbidden=forbidden1, mate_init=warm1)

    in_forced = np.zeros(n, dtype=bool)
    for (a, b) in forced:
        in_forced[a] = in_forced[b] = True
    v_m = in_forced & (mate1 >= 0)

    m1plus = set(forced)
    for v in range(n):
        w = int(mate1[v])
        if w > v:
            m1plus.add((v, w))
    # second matching graph: drop vertices already doubly covered and all
    # edges taken so far (vectorized; forced pairs may not be real edges)
    arr = hp.edge_array
    if arr.shape[0]:
        e0, e1 = arr[:, 0], arr[:, 1]
        keep = ~(v_m[e0] | v_m[e1]) & (mate1[e0] != e1)
        if forbidden1:
            fa = np.asarray(forbidden1, dtype=np.int64)
            enc = e0 * n + e1
            keep &= ~np.isin(enc, fa[:, 0] * n + fa[:, 1])
        sub = arr[keep]
    else:
        sub = arr
    adj2 = [[] for _ in range(n)]
    for u, v in sub.tolist():
        adj2[u].append(v)
        adj2[v].append(u)
    mate2 = _max_matching_on_adj(n, adj2, mate_init=warm2)

    union_adj = [[] for _ in range(n)]
    for (a, b) in m1plus:
        union_adj[a].append(b)
        union_adj[b].append(a)
    for v in range(n):
        w = int(mate2[v])
        if w > v:
            union_adj[v].append(w)
            union_adj[w].append(v)
    deg = [len(x) for x in union_adj]
    if max(deg, default=0) > 2:
        raise InternalInvariantError("matching union has a vertex of degree > 2")

    visited = [False] * n
    paths = []
    for start in range(n):
        if visited[start] or deg[start] == 2:
            continue
        visited[start] = True
        seq = [start]
        prev, v = -1, start
        while True:
            nxt = None
            for w in union_adj[v]:
                if w != prev:
                    nxt = w
                    break
            if nxt is None:
                break
            seq.append(nxt)
            visited[nxt] = True
            prev, v = v, nxt
        paths.append(seq)
    for start in range(n):
        if visited[start]:
            continue
        seq = [start]
        visited[start] = True
        prev, v = -1, start
        while True:
            nxt = None
            for w in union_adj[v]:
                if w != prev:
                    nxt = w
                    break
            if nxt is None:
                raise InternalInvariantError("broken walk in matching union")
            if nxt == start:
                break
            seq.append(nxt)
            visited[nxt] = True
            prev, v = v, nxt
        k = len(seq)
        candidates = [
            (_norm(seq[i], seq[(i + 1) % k]), i)
            for i in range(k)
            if _norm(seq[i], seq[(i + 1) % k]) not in forced_set
        ]
        if not candidates:
            raise InternalInvariantError("cycle consisting entirely of forced edges")
        cut = min(candidates)[1]
        paths.append(seq[cut + 1 :] + seq[: cut + 1])

    path_pairs = set()
    for p in paths:
        for a, b in zip(p, p[1:]):
            path_pairs.add(_norm(a, b))
    for pair in forced:
        if pair not in path_pairs:
            raise InternalInvariantError("forced edge missing from the path cover")
    return paths, (np.asarray(mate1), np.asarray(mate2))


# ---------------------------------------------------------------------------
# rotation engine
# ---------------------------------------------------------------------------

_LABEL_R = 1
_LABEL_E1 = 2


class _RotationEngine:
    """Merges a chained path cover into one Hamilton cycle.

    State: the current Hamilton path as numpy arrays (order, pos) plus a
    sparse label map for path edges that are connectors or used reservoir
    edges (working-graph edges carry no label).  Each outer iteration either
    adopts a rotation-derived path with one fewer connector, or closes a
    cycle (via a working edge between frontier endpoints, or a revealed
    reservoir edge joining the two frontiers) and breaks a connector out of
    it; with no connectors left, a closure is final.
    """

    def __init__(self, hp: Graph, forced, reservoir, params: MergeParams, want_trace=False):
        self.hp = hp
        self.n = hp.n
        self.adj = hp.adj
        self.forced = {_norm(a, b) for (a, b) in forced}
        self.reservoir = reservoir
        self.params = params
        self.revealed = 0
        self.trace = [] if want_trace else None
        self.iterations = 0

    # -- path state ---------------------------------------------------------

    def load_path(self, order, labels):
        self.order = np.asarray(order, dtype=np.int64)
        if self.order.shape[0] != self.n or len(set(order)) != self.n:
            raise InternalInvariantError("initial path must span every vertex once")
        self.pos = np.empty(self.n, dtype=np.int64)
        self.pos[self.order] = np.arange(self.n)
        self.labels = dict(labels)
        self.r = sum(1 for lab in self.labels.values() if lab == _LABEL_R)

    def _apply_chain(self, chain):
        """Materialize the path reached by a pivot chain; each element is
        (pivot position, deleted pair) in the successively rotated frames."""
        order = self.order
        L = self.n
        for (j, deleted) in chain:
            order = np.concatenate([order[: j + 1], order[L - 1 : j : -1]])
            if deleted in self.labels:
                del self.labels[deleted]
        self.order = order
        self.pos[order] = np.arange(L)
        self.r = sum(1 for lab in self.labels.values() if lab == _LABEL_R)

    # -- rotation closure ----------------------------------------------------

    def _bfs(self, cap):
        """Breadth-first closure of admissible rotations from the current
        path, fixing order[0].  Returns one of:
          ('adopt', chain)  a connector edge got deleted by some rotation
          ('close', chain)  a Hamilton cycle closes via a working edge
          ('ends', nodes, seen)  frontier exhausted (or capped)
        Nodes are (endpoint, parent_index, pivot, inserted, deleted).
        """
        L = self.n
        base_pos = self.pos
        base_order = self.order
        fixed = int(base_order[0])
        start = int(base_order[-1])
        fixed_nbrs = set(self.adj[fixed])
        nodes = [(start, -1, -1, None, None)]
        seen = {start}
        if self.r == 0 and start in fixed_nbrs:
            return ("close", [])
        head = 0
        adj = self.adj
        forced = self.forced
        labels = self.labels
        while head < len(nodes) and len(nodes) < cap:
            node_idx = head
            head += 1
            endpoint = nodes[node_idx][0]
            # chain of pivots root->node and edge events node->root
            chain = []
            events = []
            i = node_idx
            while i >= 0:
                nd = nodes[i]
                if nd[2] >= 0:
                    chain.append(nd[2])
                    events.append((nd[3], nd[4]))
                i = nd[1]
            chain.reverse()
            for x in adj[endpoint]:
                q = int(base_pos[x])
                for j in chain:
                    if q > j:
                        q = L + j - q
                if q >= L - 2:
                    continue
                b = q + 1
                for j in reversed(chain):
                    if b > j:
                        b = L + j - b
                succ = int(base_order[b])
                pair = (x, succ) if x < succ else (succ, x)
                if pair in forced:
                    continue
                lab = None
                decided = False
                for ins, dele in events:
                    if pair == ins:
                        decided = True
                        break
                    if pair == dele:
                        raise InternalInvariantError("deleted edge resurfaced on path")
                if not decided:
                    lab = labels.get(pair)
                if lab == _LABEL_R:
                    full = self._node_chain(nodes, node_idx)
                    full.append((q, pair))
                    return ("adopt", full)
                if succ in seen:
                    continue
                seen.add(succ)
                nodes.append((succ, node_idx, q, _norm(endpoint, x), pair))
                if succ in fixed_nbrs:
                    return ("close", self._node_chain(nodes, len(nodes) - 1))
        return ("ends", nodes, seen)

    @staticmethod
    def _node_chain(nodes, node_idx):
        out = []
        i = node_idx
        while i >= 0:
            nd = nodes[i]
            if nd[2] >= 0:
                out.append((nd[2], nd[4]))
            i = nd[1]
        out.reverse()
        return out

    def _break_connector(self):
        """The current order array, read cyclically, is a Hamilton cycle.
        With connectors left, split the cycle at the smallest one and keep
        going; with none, we are done."""
        if self.r == 0:
            return True
        pair = min(p for p, lab in self.labels.items() if lab == _LABEL_R)
        pa, pb = int(self.pos[pair[0]]), int(self.pos[pair[1]])
        lo, hi = min(pa, pb), max(pa, pb)
        if hi - lo == 1:
            split = hi
        elif lo == 0 and hi == self.n - 1:
            split = 0
        else:
            raise InternalInvariantError("connector pair not adjacent on the cycle")
        if split:
            self.order = np.concatenate([self.order[split:], self.order[:split]])
            self.pos[self.order] = np.arange(self.n)
        del self.labels[pair]
        self.r -= 1
        return False

    # -- outer loop -----------------------------------------------------------

    def run(self, order, labels):
        self.load_path(order, labels)
        max_iter = self.r + len(self.reservoir) + 16
        while True:
            self.iterations += 1
            if self.iterations > max_iter:
                raise InternalInvariantError("rotation engine failed to make progress")
            sig = self._bfs(self.params.end1_cap)
            if sig[0] == "adopt":
                self._apply_chain(sig[1])
                self._trace("adopt", len(sig[1]))
                continue
            if sig[0] == "close":
                self._apply_chain(sig[1])
                self._trace("close-working", len(sig[1]))
                if self._break_connector():
                    return self._success()
                continue
            _, nodes, end1 = sig
            outcome = self._reveal_phase(nodes, end1)
            if outcome == "success":
                return self._success()
            if outcome == "failure":
                return self._failure(len(end1))
            # "adopted": path already updated, next iteration

    def _reveal_phase(self, nodes, end1):
        """Scan the already-revealed reservoir prefix, then reveal new edges
        one by one, looking for an edge joining the two rotation frontiers."""
        node_of = {}
        for i, nd in enumerate(nodes):
            if nd[0] not in node_of:
                node_of[nd[0]] = i
        cache: dict = {}
        idx = 0
        while True:
            if idx < self.revealed:
                edge = self.reservoir[idx]
                idx += 1
            elif self.revealed < len(self.reservoir):
                edge = self.reservoir[self.revealed]
                self.revealed += 1
                idx = self.revealed
            else:
                return "failure"
            a, b = edge
            pair = _norm(a, b)
            if pair in self.labels:
                continue  # already a path edge
            for (x, target) in ((a, b), (b, a)):
                if x not in end1:
                    continue
                got = self._probe_second(nodes, node_of[x], x, target, cache)
                if got == "absent":
                    continue
                if got == "adopted":
                    return "adopted"
                if got == "success":
                    return "success"
                # "found": order now runs x .. target; close with this edge
                self.labels[pair] = _LABEL_E1
                self._trace("close-reservoir", 0)
                if self._break_connector():
                    return "success"
                return "adopted"
        # unreachable

    def _probe_second(self, nodes, node_idx, w, target, cache):
        """Second rotation frontier for endpoint w: materialize the path
        reaching w, reverse it so w is the fixed endpoint, and explore.  On
        'found' the engine's path runs from w to target."""
        state = cache.get(w)
        if state is None:
            saved_order, saved_labels = self.order, dict(self.labels)
            self._apply_chain(self._node_chain(nodes, node_idx))
            self.order = self.order[::-1].copy()
            self.pos[self.order] = np.arange(self.n)
            sig = self._bfs(self.params.end2_cap)
            if sig[0] == "adopt":
                self._apply_chain(sig[1])
                self._trace("adopt-second", len(sig[1]))
                return "adopted"
            if sig[0] == "close":
                self._apply_chain(sig[1])
                self._trace("close-working-second", len(sig[1]))
                return "success" if self._break_connector() else "adopted"
            _, nodes2, end2 = sig
            state = (self.order, dict(self.labels), nodes2, end2)
            cache[w] = state
            self.order, self.labels = saved_order, saved_labels
            self.pos[self.order] = np.arange(self.n)
        base_order, base_labels, nodes2, end2 = state
        if target not in end2:
            return "absent"
        self.order = base_order
        self.labels = dict(base_labels)
        self.pos[self.order] = np.arange(self.n)
        self.r = sum(1 for lab in self.labels.values() if lab == _LABEL_R)
        node_of2 = {}
        for i, nd in enumerate(nodes2):
            if nd[0] not in node_of2:
                node_of2[nd[0]] = i
        self._apply_chain(self._node_chain(nodes2, node_of2[target]))
        return "found"

    # -- reporting -------------------------------------------------------------

    def _trace(self, kind, depth):
        if self.trace is not None:
            self.trace.append(
                {
                    "iteration": self.iterations,
                    "event": kind,
                    "connectors_left": self.r,
                    "depth": depth,
                    "reveals_used": self.revealed,
                }
            )

    def _success(self):
        cycle = tuple(int(v) for v in self.order)
        self._validate(cycle)
        return MergeResult(
            success=True,
            cycle=cycle,
            iterations=self.iterations,
            reveals_used=self.revealed,
            e1_size=len(self.reservoir),
            trace=self.trace or [],
        )

    def _failure(self, frontier_size):
        return MergeResult(
            success=False,
            cycle=None,
            iterations=self.iterations,
            reveals_used=self.revealed,
            e1_size=len(self.reservoir),
            frontier_size=frontier_size,
            reason="reservoir exhausted",
            trace=self.trace or [],
            salvage_path=tuple(int(v) for v in self.order),
            salvage_labels=dict(self.labels),
        )

    def _validate(self, cycle):
        n = self.n
        if len(cycle) != n or len(set(cycle)) != n:
            raise InternalInvariantError("cycle does not visit every vertex once")
        revealed_set = {_norm(a, b) for (a, b) in self.reservoir[: self.revealed]}
        hp_eset = self.hp.edge_set
        cycle_pairs = set()
        for i in range(n):
            pair = _norm(cycle[i], cycle[(i + 1) % n])
            cycle_pairs.add(pair)
            lab = self.labels.get(pair)
            if lab == _LABEL_R:
                raise InternalInvariantError("connector edge left in final cycle")
            if lab == _LABEL_E1:
                if pair not in revealed_set:
                    raise InternalInvariantError("unrevealed reservoir edge used")
            elif pair not in hp_eset and pair not in self.forced:
                raise InternalInvariantError(f"cycle edge {pair} has no provenance")
        for pair in self.forced:
            if pair not in cycle_pairs:
                raise InternalInvariantError("forced edge missing from final cycle")


def posa_merge(
    inst: HamiltonInstance,
    paths,
    seed,
    params: MergeParams | None = None,
    want_trace: bool = False,
) -> MergeResult:
    """Merge a path cover into a Hamilton cycle through all forced edges.

    The initial Hamilton path chains the cover paths (ordered by smallest
    contained vertex) with virtual connector edges.  ``seed`` is carried for
    interface symmetry; given the instance (whose reveal order is already
    fixed) the merge is deterministic.
    """
    params = params or MergeParams()
    ordered = sorted((min(p), list(p)) for p in paths)
    chain_order = []
    labels = {}
    connectors = []
    prev_tail = None
    for _, p in ordered:
        if prev_tail is not None:
            pair = _norm(prev_tail, p[0])
            connectors.append(pair)
            labels[pair] = _LABEL_R
        chain_order.extend(p)
        prev_tail = p[-1]
    inst.connectors = tuple(connectors)
    if len(chain_order) < 3:
        return MergeResult(
            success=False,
            cycle=None,
            iterations=0,
            reveals_used=0,
            e1_size=len(inst.reservoir),
            reason="fewer than 3 vertices",
        )
    engine = _RotationEngine(
        inst.h_prime, inst.forced, inst.reservoir, params, want_trace=want_trace
    )
    return engine.run(chain_order, labels)


def validate_cycle(g: Graph, cycle, forced_paths=()) -> None:
    """Independent check: a simple cycle of g, with every given path
    appearing contiguously (forwards or backwards)."""
    n = len(cycle)
    if n < 3:
        raise InternalInvariantError("cycle too short")
    if len(set(cycle)) != n:
        raise InternalInvariantError("repeated vertex in cycle")
    eset = g.edge_set
    for i in range(n):
        a, b = cycle[i], cycle[(i + 1) % n]
        if _norm(a, b) not in eset:
            raise InternalInvariantError(f"cycle edge {(a, b)} not in graph")
    if forced_paths:
        position = {v: i for i, v in enumerate(cycle)}
        for path in forced_paths:
            idxs = [position.get(v) for v in path]
            if any(i is None for i in idxs):
                raise InternalInvariantError("contracted path vertex missing from cycle")
            deltas = {(idxs[i + 1] - idxs[i]) % n for i in range(len(idxs) - 1)}
            if deltas != {1} and deltas != {n - 1}:
                raise InternalInvariantError("contracted path not contiguous in cycle")


class LongestCyclePipeline:
    """Shared heavy stages (coloring, covers, bound) for one graph, with
    per-deficiency runs on top.  Reveal coins are derived from the seed and
    the attempt index only, so runs at different deficiencies share them."""

    def __init__(
        self,
        g: Graph,
        seed,
        *,
        k: int = 4,
        params: MergeParams | None = None,
        p_prime: float | None = None,
        c_hint: float | None = None,
    ):
        self.g = g
        self.seed = as_seed(seed)
        self.params = params or MergeParams()
        self.p_prime = p_prime
        self.coloring = strong_core_coloring(g, k)
        if not np.any(self.coloring.colors == BLACK):
            raise UnsupportedRegimeError(
                "empty strong core: constructive pipeline not applicable"
            )
        self.family = build_cover_family(g, self.coloring)
        self.bound = longest_cycle_upper_bound(g, self.coloring, self.family)
        self.singles = extract_singles(self.family)
        self.c_hint = c_hint
        self._decompose_cache: dict = {}
        self._warm: dict = {}

    @property
    def max_deficiency(self) -> int:
        return len(self.singles)

    def run(self, deficiency: int = 0, want_trace: bool = False) -> CycleResult:
        gi = build_gamma(self.g, self.coloring, self.family, deficiency)
        black_local = self.coloring.colors[gi.orig_ids] == BLACK
        diagnostics: dict = {"gamma_n": gi.gamma.n, "forced_edges": len(gi.forced)}
        trace: list = []
        best_fail = None
        for attempt in range(self.params.retries):
            key = (attempt, gi.base.n, gi.base.m, hash(gi.orig_ids.tobytes()))
            inst_base = self._decompose_cache.get(key)
            if inst_base is None:
                inst_base = decompose(
                    gi.base,
                    black_local,
                    self.seed.child("reveal", attempt),
                    c=self.c_hint,
                    p_prime=self.p_prime,
                )
                if len(self._decompose_cache) > 8:
                    self._decompose_cache.clear()
                    self._warm.clear()
                self._decompose_cache[key] = inst_base
            inst = HamiltonInstance(
                h_prime=inst_base.h_prime,
                reservoir=inst_base.reservoir,
                v1=inst_base.v1,
                p_prime=inst_base.p_prime,
                forced=gi.forced,
            )
            paths, mates = cover_paths_via_matchings(inst, warm=self._warm.get(key))
            self._warm[key] = mates
            diagnostics[f"paths_attempt_{attempt}"] = len(paths)
            res = posa_merge(
                inst, paths, self.seed.child("merge", attempt), self.params, want_trace
            )
            trace.extend(res.trace)
            if res.success:
                cyc = gi.expand_cycle(res.cycle)
                validate_cycle(self.g, cyc, forced_paths=gi.expansion.values())
                achieved = len(cyc)
                if achieved != self.bound - deficiency:
                    raise InternalInvariantError(
                        f"expanded cycle length {achieved} != "
                        f"{self.bound} - {deficiency}"
                    )
                return CycleResult(
                    n=self.g.n,
                    bound=self.bound,
                    deficiency=deficiency,
                    success=True,
                    achieved=achieved,
                    cycle=cyc,
                    retries=attempt,
                    reveals_used=res.reveals_used,
                    diagnostics=diagnostics,
                    trace=trace,
                )
            best_fail = res
        salvage = self._salvage(gi, best_fail)
        diagnostics["failure_reason"] = best_fail.reason
        diagnostics["frontier_size"] = best_fail.frontier_size
        return CycleResult(
            n=self.g.n,
            bound=self.bound,
            deficiency=deficiency,
            success=False,
            achieved=len(salvage) if salvage else 0,
            cycle=salvage,
            retries=self.params.retries,
            reveals_used=best_fail.reveals_used,
            diagnostics=diagnostics,
            trace=trace,
        )

    def _salvage(self, gi: ContractedInstance, res: MergeResult):
        """Best cycle recoverable from a failed merge: the longest
        connector-free segment of the final path closable by a real edge."""
        if res is None or res.salvage_path is None:
            return None
        path, labels = res.salvage_path, res.salvage_labels
        segments = []
        cur = [path[0]]
        for a, b in zip(path, path[1:]):
            if labels.get(_norm(a, b)) == _LABEL_R:
                segments.append(cur)
                cur = [b]
            else:
                cur.append(b)
        segments.append(cur)
        gamma_eset = gi.gamma.edge_set
        best = None
        for seg in segments:
            if len(seg) >= 3 and _norm(seg[0], seg[-1]) in gamma_eset:
                if best is None or len(seg) > len(best):
                    best = seg
        if best is None:
            return None
        cyc = gi.expand_cycle(tuple(best))
        validate_cycle(self.g, cyc)
        return cyc


def longest_cycle(
    g: Graph,
    seed,
    *,
    params: MergeParams | None = None,
    want_trace: bool = False,
) -> CycleResult:
    """Full pipeline: color, cover, contract, decompose, match, merge.
    Deterministic for fixed (graph, seed)."""
    pipe = LongestCyclePipeline(g, seed, params=params)
    return pipe.run(0, want_trace=want_trace)


def cycle_of_deficiency(
    g: Graph, seed, i: int, *, params: MergeParams | None = None
) -> CycleResult:
    """A validated cycle exactly i vertices shorter than the upper bound."""
    pipe = LongestCyclePipeline(g, seed, params=params)
    if not (0 <= i <= pipe.max_deficiency):
        raise InvalidParameterError(
            f"deficiency {i} outside [0, {pipe.max_deficiency}]"
        )
    return pipe.run(i)


def deficiency_sweep(g: Graph, seed, deficiencies, *, params: MergeParams | None = None):
    """Run several deficiencies against one shared pipeline.  Same contract
    as calling cycle_of_deficiency per value; heavy stages are reused."""
    pipe = LongestCyclePipeline(g, seed, params=params)
    out = []
    for i in deficiencies:
        if not (0 <= i <= pipe.max_deficiency):
            raise InvalidParameterError(
                f"deficiency {i} outside [0, {pipe.max_deficiency}]"
            )
        out.append(pipe.run(i))
    return out
