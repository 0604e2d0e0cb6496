"""Exact per-component path-cover optimization.

For a component T of the red/blue subgraph, a *cover* is a set of
vertex-disjoint paths inside T whose endpoints are all blue.  The solvers
below minimize the number of red vertices left uncovered (phi), and among
minimizers maximize the number of paths covering exactly one red vertex.

Three exact tiers, dispatched by structure:
  * trees of any size: linear dynamic program;
  * cyclic components up to ``small_cap`` vertices: memoized search
    branching on the lowest uncovered red vertex;
  * larger cyclic components: 0/1 integer program with iterative cycle
    elimination (exact phi; the single-red tie-break is then improved by an
    exact per-path splitting pass rather than optimized globally).

Values are scalarized as covered*(W) + singles with W larger than any
possible singles count, so lexicographic optimization composes additively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InternalInvariantError,
    InvalidColoringError,
    SizeCapError,
    UnsupportedRegimeError,
)
from .graph import Graph, induced_subgraph
from .strongcore import BLACK, BLUE, RED, Coloring, rb_subgraph

__all__ = [
    "PathCover",
    "CoverFamily",
    "optimal_path_cover",
    "build_cover_family",
    "greedy_cover",
    "longest_cycle_upper_bound",
    "extract_singles",
    "validate_cover",
]

_NEG = float("-inf")

# default vertex cap for the memoized small-component solver
SMALL_CAP = 28


@dataclass(frozen=True)
class PathCover:
    """Optimal cover of one component: vertex-disjoint blue-endpoint paths
    plus the count of red vertices no path covers.  path_reds[i] is the
    number of red vertices path i covers."""

    component_id: int
    vertices: tuple
    paths: tuple
    path_reds: tuple
    uncovered_red: int
    n_red: int

    @property
    def covered_red(self) -> int:
        return self.n_red - self.uncovered_red


@dataclass
class CoverFamily:
    """Fixed optimal covers for every component, plus the paths covering a
    single red vertex (ordered by smallest contained vertex id)."""

    covers: list = field(default_factory=list)
    total_phi: int = 0

    @property
    def singles(self) -> list:
        return extract_singles(self)

    def all_paths(self) -> list:
        out = []
        for cover in self.covers:
            out.extend(cover.paths)
        return out


def _path_red_count(path, colors) -> int:
    return sum(1 for v in path if colors[v] == RED)


def validate_cover(comp: Graph, colors, paths) -> None:
    """Raise InternalInvariantError if the paths are not a valid cover."""
    seen = set()
    edge_set = comp.edge_set
    for path in paths:
        if len(path) == 0:
            raise InternalInvariantError("empty path")
        for v in path:
            if v in seen:
                raise InternalInvariantError("paths are not vertex-disjoint")
            seen.add(v)
        if colors[path[0]] != BLUE or colors[path[-1]] != BLUE:
            raise InternalInvariantError("path endpoint is not blue")
        for a, b in zip(path, path[1:]):
            if (min(a, b), max(a, b)) not in edge_set:
                raise InternalInvariantError(f"path uses a non-edge {(a, b)}")


# ---------------------------------------------------------------------------
# tree solver
# ---------------------------------------------------------------------------

def _solve_tree(adj, colors, W):
    """Exact solver for tree components.  Returns (scalar value, paths)."""
    n = len(adj)
    root = 0
    parent = [-1] * n
    order = [root]
    parent[root] = root
    for v in order:
        for w in adj[v]:
            if parent[w] == -1:
                parent[w] = v
                order.append(w)
    parent[root] = -1
    children = [[] for _ in range(n)]
    for v in order[1:]:
        children[parent[v]].append(v)

    # dp[v] = (C, O0, O1, O2): best scalar with v closed, or exporting an
    # upward arm carrying 0/1/2+ covered reds (v included).
    dp = [None] * n
    choice = [None] * n  # reconstruction records

    for v in reversed(order):
        vred = 1 if colors[v] == RED else 0
        vblue = colors[v] == BLUE
        kids = children[v]
        # child export: closed outright, or its arm terminated at the child
        ec = []
        ec_choice = []
        base0 = 0.0
        for c in kids:
            cC, cO0, cO1, cO2 = dp[c]
            best, tag = cC, ("C",)
            if colors[c] == BLUE:
                for j, val in ((0, cO0), (1, cO1), (2, cO2)):
                    cand = val + (1 if j == 1 else 0)
                    if cand > best:
                        best, tag = cand, ("close", j)
            ec.append(best)
            ec_choice.append(tag)
            base0 += best
        # arm gains per class: taking child c's O_j instead of its export
        gains = {0: [], 1: [], 2: []}
        for i, c in enumerate(kids):
            cC, cO0, cO1, cO2 = dp[c]
            for j, val in ((0, cO0), (1, cO1), (2, cO2)):
                g = val - ec[i]
                if g > _NEG:
                    gains[j].append((g, i))
        top2 = {}
        for j in (0, 1, 2):
            gains[j].sort(key=lambda t: (-t[0], t[1]))
            top2[j] = gains[j][:2]

        best_c, best_c_tag = base0, ("free",)
        # one arm terminated at v (v must be blue)
        if vblue:
            for j in (0, 1, 2):
                if top2[j]:
                    g, i = top2[j][0]
                    cand = base0 + g + (1 if j == 1 else 0)
                    if cand > best_c:
                        best_c, best_c_tag = cand, ("term", i, j)
        # two arms joined through v
        for j1 in (0, 1, 2):
            for j2 in range(j1, 3):
                pick = None
                if j1 == j2:
                    if len(top2[j1]) >= 2:
                        (g1, i1), (g2, i2) = top2[j1][0], top2[j1][1]
                        pick = (g1 + g2, i1, i2)
                else:
                    if top2[j1] and top2[j2]:
                        (g1, i1) = top2[j1][0]
                        (g2, i2) = top2[j2][0]
                        if i1 == i2:
                            alt = _NEG
                            alt_pick = None
                            if len(top2[j1]) >= 2:
                                ga, ia = top2[j1][1]
                                alt, alt_pick = ga + g2, (ia, i2)
                            if len(top2[j2]) >= 2:
                                gb, ib = top2[j2][1]
                                if g1 + gb > alt:
                                    alt, alt_pick = g1 + gb, (i1, ib)
                            if alt_pick is None:
                                continue
                            pick = (alt, alt_pick[0], alt_pick[1])
                        else:
                            pick = (g1 + g2, i1, i2)
                if pick is None:
                    continue
                gsum, i1, i2 = pick
                total_red = j1 + j2 + vred
                cand = base0 + gsum + vred * W + (1 if total_red == 1 else 0)
                if cand > best_c:
                    best_c, best_c_tag = cand, ("join", i1, j1, i2, j2)

        o_best = [_NEG, _NEG, _NEG]
        o_tag = [None, None, None]
        if vblue:
            o_best[0], o_tag[0] = base0, ("fresh",)
        for j in (0, 1, 2):
            if top2[j]:
                g, i = top2[j][0]
                cls = min(2, j + vred)
                cand = base0 + g + vred * W
                if cand > o_best[cls]:
                    o_best[cls], o_tag[cls] = cand, ("extend", i, j)
        dp[v] = (best_c, o_best[0], o_best[1], o_best[2])
        choice[v] = (best_c_tag, o_tag, ec_choice, kids)

    # root: close its arm if that beats staying closed
    rC, rO0, rO1, rO2 = dp[root]
    best, mode = rC, ("C",)
    if colors[root] == BLUE:
        for j, val in ((0, rO0), (1, rO1), (2, rO2)):
            cand = val + (1 if j == 1 else 0)
            if cand > best:
                best, mode = cand, ("close", j)

    paths: list = []

    def arm(v, j):
        """Vertex sequence of v's exported arm of class j, v first."""
        _, o_tag, ec_choice, kids = choice[v]
        tag = o_tag[j]
        if tag is None:
            raise InternalInvariantError("reconstructing an invalid arm state")
        if tag[0] == "fresh":
            emit_children(v, skip=())
            return [v]
        _, i, cj = tag
        emit_children(v, skip=(i,))
        return [v] + arm(kids[i], cj)

    def emit_children(v, skip):
        _, _, ec_choice, kids = choice[v]
        for i, c in enumerate(kids):
            if i in skip:
                continue
            tag = ec_choice[i]
            if tag[0] == "C":
                emit_closed(c)
            else:
                paths.append(arm(c, tag[1]))

    def emit_closed(v):
        tag, _, _, kids = choice[v]
        if tag[0] == "free":
            emit_children(v, skip=())
        elif tag[0] == "term":
            _, i, j = tag
            emit_children(v, skip=(i,))
            paths.append([v] + arm(kids[i], j))
        elif tag[0] == "join":
            _, i1, j1, i2, j2 = tag
            emit_children(v, skip=(i1, i2))
            left = arm(kids[i1], j1)
            right = arm(kids[i2], j2)
            paths.append(list(reversed(left)) + [v] + right)
        else:
            raise InternalInvariantError(f"unknown choice {tag}")

    if mode[0] == "C":
        emit_closed(root)
    else:
        paths.append(arm(root, mode[1]))
    return best, paths


# ---------------------------------------------------------------------------
# memoized solver for small cyclic components
# ---------------------------------------------------------------------------

def _solve_small(adj, colors, W):
    """Branch on the lowest available red: leave it uncovered, or route a
    blue-to-blue path through it.  Memoized on the available-vertex mask."""
    n = len(adj)
    adjmask = [0] * n
    for v in range(n):
        for w in adj[v]:
            adjmask[v] |= 1 << w
    redmask = 0
    for v in range(n):
        if colors[v] == RED:
            redmask |= 1 << v
    memo = {}

    def arms_from(start, avail):
        """All simple paths start->blue inside avail (start excluded from
        avail); yields (mask excluding start, last vertex, reds on arm)."""
        out = []
        stack = [(start, 0, 0, ())]
        while stack:
            v, mask, reds, seq = stack.pop()
            for w in adj[v]:
                bit = 1 << w
                if not (avail & bit) or (mask & bit):
                    continue
                nm = mask | bit
                nr = reds + (1 if colors[w] == RED else 0)
                nseq = seq + (w,)
                if colors[w] == BLUE:
                    out.append((nm, nr, nseq))
                stack.append((w, nm, nr, nseq))
        return out

    def best(avail):
        reds = avail & redmask
        if reds == 0:
            return 0.0, None
        hit = memo.get(avail)
        if hit is not None:
            return hit
        r = (reds & -reds).bit_length() - 1
        rbit = 1 << r
        val, pick = best(avail & ~rbit)[0], None
        rest = avail & ~rbit
        left_arms = arms_from(r, rest)
        for lmask, lreds, lseq in left_arms:
            lfirst = lseq[0]
            for rmask, rreds, rseq in arms_from(r, rest & ~lmask):
                if rseq[0] <= lfirst:
                    continue  # each unordered pair of arms once
                total = lreds + rreds + 1
                sub, _ = best(avail & ~rbit & ~lmask & ~rmask)
                cand = total * W + (1 if total == 1 else 0) + sub
                if cand > val:
                    val = cand
                    pick = tuple(reversed(lseq)) + (r,) + rseq
        memo[avail] = (val, pick)
        return val, pick

    full = (1 << n) - 1
    total_val, _ = best(full)
    paths = []
    avail = full
    while avail & redmask:
        _, pick = best(avail)
        if pick is None:
            reds = avail & redmask
            avail &= ~(reds & -reds)
        else:
            paths.append(list(pick))
            for v in pick:
                avail &= ~(1 << v)
    return total_val, paths


# ---------------------------------------------------------------------------
# integer-program solver for large cyclic components
# ---------------------------------------------------------------------------

def _find_cycles(n, edges, chosen):
    """Cycles in the subgraph given by chosen edge indices (degrees <= 2),
    each as a list of edge indices."""
    adj = [[] for _ in range(n)]
    for ei in chosen:
        u, v = edges[ei]
        adj[u].append((v, ei))
        adj[v].append((u, ei))
    seen_edge = [False] * len(edges)
    visited = [False] * n
    cycles = []
    for s in range(n):
        if visited[s] or len(adj[s]) != 2:
            continue
        # walk the component; it is a cycle iff we return to s with all deg 2
        cyc = []
        prev_edge = -1
        v = s
        ok = True
        while True:
            visited[v] = True
            if len(adj[v]) != 2:
                ok = False
                break
            nxt = None
            for (w, ei) in adj[v]:
                if ei != prev_edge:
                    nxt = (w, ei)
                    break
            if nxt is None:
                ok = False
                break
            w, ei = nxt
            cyc.append(ei)
            prev_edge = ei
            v = w
            if v == s:
                break
        if ok and v == s and len(cyc) >= 3:
            cycles.append(cyc)
    return cycles


def _milp_reduce(comp: Graph, colors):
    """Exact preprocessing for the program tier: red vertices of degree at
    most 1 can never be covered (a red endpoint is invalid), so they and
    their edges go, iteratively; vertices in pieces without any blue vertex
    are uncoverable wholesale."""
    n = comp.n
    adj = [set(a) for a in comp.adj]
    alive = [True] * n
    stack = [v for v in range(n) if colors[v] == RED and len(adj[v]) <= 1]
    while stack:
        v = stack.pop()
        if not alive[v] or colors[v] != RED or len(adj[v]) > 1:
            continue
        alive[v] = False
        for w in adj[v]:
            adj[w].discard(v)
            if colors[w] == RED and len(adj[w]) <= 1 and alive[w]:
                stack.append(w)
        adj[v] = set()
    # drop pieces with no blue vertex: nothing in them is coverable
    seen = [False] * n
    for s in range(n):
        if seen[s] or not alive[s]:
            continue
        piece = [s]
        seen[s] = True
        qi = 0
        while qi < len(piece):
            v = piece[qi]
            qi += 1
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    piece.append(w)
        if not any(colors[v] == BLUE for v in piece):
            for v in piece:
                alive[v] = False
    keep = [v for v in range(n) if alive[v]]
    edges = [
        (u, v) for (u, v) in comp.edges() if alive[u] and alive[v]
    ]
    return keep, edges


def _solve_milp(comp: Graph, colors, W):
    """Exact phi via 0/1 programming with iterative cycle elimination.

    Reds must have path-degree 0 or 2, blues at most 2.  A tiny per-edge
    penalty (too small to trade against one covered red) makes minimum-edge
    optima preferred, so cycles survive only when they have no blue-blue
    edge to break; those are forbidden explicitly and the program re-solved.
    The single-red tie-break is then improved by exact per-path splitting,
    not optimized globally.
    """
    from scipy import optimize, sparse

    n = comp.n
    keep, edges = _milp_reduce(comp, colors)
    m = len(edges)
    reds = [v for v in keep if colors[v] == RED]
    nred = len(reds)
    if m == 0 or nred == 0:
        return 0.0, []
    red_pos = {v: i for i, v in enumerate(reds)}
    nvar = m + nred

    inc = {v: [] for v in keep}
    for ei, (u, v) in enumerate(edges):
        inc[u].append(ei)
        inc[v].append(ei)
    rows, cols, vals = [], [], []
    lo, hi = [], []
    row = 0
    for v in keep:
        if not inc[v]:
            continue
        for ei in inc[v]:
            rows.append(row), cols.append(ei), vals.append(1.0)
        if colors[v] == RED:
            rows.append(row), cols.append(m + red_pos[v]), vals.append(-2.0)
            lo.append(0.0), hi.append(0.0)
        else:
            lo.append(0.0), hi.append(2.0)
        row += 1

    c = np.full(nvar, 1.0 / (4.0 * (m + 1)))
    c[m:] = -1.0
    integrality = np.ones(nvar)
    bounds = optimize.Bounds(0, 1)

    extra_rows = []
    while True:
        all_rows, all_cols, all_vals = list(rows), list(cols), list(vals)
        all_lo, all_hi = list(lo), list(hi)
        r = row
        for cyc in extra_rows:
            for ei in cyc:
                all_rows.append(r), all_cols.append(ei), all_vals.append(1.0)
            all_lo.append(0.0), all_hi.append(float(len(cyc) - 1))
            r += 1
        mat = sparse.csr_matrix(
            (all_vals, (all_rows, all_cols)), shape=(r, nvar)
        )
        # presolve stays off: scipy 1.15 / HiGHS presolve mis-solves these
        # degree-parity systems (declares the zero solution optimal)
        res = optimize.milp(
            c=c,
            constraints=optimize.LinearConstraint(mat, all_lo, all_hi),
            integrality=integrality,
            bounds=bounds,
            options={"mip_rel_gap": 0.0, "presolve": False},
        )
        if res.status != 0 or res.x is None:
            raise InternalInvariantError(f"integer program failed: {res.message}")
        x = np.rint(res.x[:m]).astype(int)
        chosen = [ei for ei in range(m) if x[ei]]
        cycles = _find_cycles(n, edges, chosen)
        if not cycles:
            break
        extra_rows.extend(cycles)
        if len(extra_rows) > 40 * (nred + 1):
            raise InternalInvariantError("cycle elimination failed to converge")

    # extract paths from the chosen forest
    adj = [[] for _ in range(n)]
    for ei in chosen:
        u, v = edges[ei]
        adj[u].append(v)
        adj[v].append(u)
    deg = [len(a) for a in adj]
    used = [False] * n
    paths = []
    for s in range(n):
        if deg[s] != 1 or used[s]:
            continue
        seq = [s]
        used[s] = True
        prev, v = -1, s
        while True:
            nxt = None
            for w in adj[v]:
                if w != prev:
                    nxt = w
                    break
            if nxt is None or used[nxt]:
                break
            seq.append(nxt)
            used[nxt] = True
            prev, v = v, nxt
        if len(seq) >= 2:
            paths.append(seq)

    paths = [p for p in paths if _path_red_count(p, colors) > 0]
    paths = [seg for p in paths for seg in _split_for_singles(p, colors)]
    covered = sum(_path_red_count(p, colors) for p in paths)
    singles = sum(1 for p in paths if _path_red_count(p, colors) == 1)
    return covered * W + singles, paths


def _split_for_singles(path, colors):
    """Split a path at blue-blue edges to maximize the number of segments
    covering exactly one red vertex; exact quadratic DP per path."""
    L = len(path)
    red_prefix = [0] * (L + 1)
    for i, v in enumerate(path):
        red_prefix[i + 1] = red_prefix[i] + (1 if colors[v] == RED else 0)
    # boundary i sits between vertices i-1 and i; cutting there needs both blue
    boundaries = [0] + [
        i
        for i in range(1, L)
        if colors[path[i - 1]] == BLUE and colors[path[i]] == BLUE
    ] + [L]
    nb = len(boundaries)
    best = [0] * nb
    back = [0] * nb
    for bi in range(1, nb):
        i = boundaries[bi]
        best[bi], back[bi] = -1, 0
        for sj in range(bi):
            s = boundaries[sj]
            reds = red_prefix[i] - red_prefix[s]
            cand = best[sj] + (1 if reds == 1 else 0)
            if cand > best[bi]:
                best[bi], back[bi] = cand, sj
    cuts = []
    bi = nb - 1
    while bi > 0:
        cuts.append(boundaries[bi])
        bi = back[bi]
    cuts.append(0)
    cuts.reverse()
    segments = [path[cuts[i] : cuts[i + 1]] for i in range(len(cuts) - 1)]
    return [seg for seg in segments if _path_red_count(seg, colors) > 0]


# ---------------------------------------------------------------------------
# dispatcher and family assembly
# ---------------------------------------------------------------------------

def _canonical_paths(paths, colors):
    out = []
    for p in paths:
        if _path_red_count(p, colors) == 0:
            continue
        seq = tuple(p)
        if seq[-1] < seq[0]:
            seq = tuple(reversed(seq))
        out.append(seq)
    out.sort(key=lambda s: (min(s), s))
    return tuple(out)


def optimal_path_cover(
    comp: Graph,
    colors,
    *,
    component_id: int = 0,
    size_cap: int | None = None,
    small_cap: int = SMALL_CAP,
) -> PathCover:
    """Exact minimum-uncovered cover of one red/blue component.

    ``colors`` labels the component's own vertex ids.  ``size_cap``, when
    set, raises SizeCapError for larger components instead of solving them.
    """
    n = comp.n
    colors = np.asarray(colors)
    if size_cap is not None and n > size_cap:
        raise SizeCapError(
            f"component {component_id} has {n} vertices, above the cap {size_cap}"
        )
    if np.any(colors[: comp.n] == BLACK):
        raise InvalidColoringError("component contains black vertices")
    nred = int(np.count_nonzero(colors[: comp.n] == RED))
    W = n + 1
    if nred == 0:
        value, paths = 0.0, []
    elif comp.m == n - 1:
        value, paths = _solve_tree(comp.adj, colors, W)
    elif n <= small_cap:
        value, paths = _solve_small(comp.adj, colors, W)
    else:
        value, paths = _solve_milp(comp, colors, W)
    covered = int(value // W)
    canon = _canonical_paths(paths, colors)
    validate_cover(comp, colors, canon)
    path_reds = tuple(_path_red_count(p, colors) for p in canon)
    if sum(path_reds) != covered:
        raise InternalInvariantError(
            f"solver reported {covered} covered reds but paths cover {sum(path_reds)}"
        )
    return PathCover(
        component_id=component_id,
        vertices=tuple(range(n)),
        paths=canon,
        path_reds=path_reds,
        uncovered_red=nred - covered,
        n_red=nred,
    )


def build_cover_family(
    g: Graph,
    col: Coloring,
    *,
    size_cap: int | None = None,
    small_cap: int = SMALL_CAP,
) -> CoverFamily:
    """Solve every component of the red/blue subgraph; paths are reported in
    the original graph's vertex ids."""
    _, _, comps = rb_subgraph(g, col)
    fam = CoverFamily()
    for cid, cell in enumerate(comps):
        sub, idx = induced_subgraph(g, cell)
        local_colors = col.colors[idx]
        cover = optimal_path_cover(
            sub, local_colors, component_id=cid, size_cap=size_cap, small_cap=small_cap
        )
        gpaths = tuple(
            tuple(int(idx[v]) for v in path) for path in cover.paths
        )
        gpaths = _canonical_paths(gpaths, col.colors)
        fam.covers.append(
            PathCover(
                component_id=cid,
                vertices=tuple(int(v) for v in idx),
                paths=gpaths,
                path_reds=tuple(_path_red_count(p, col.colors) for p in gpaths),
                uncovered_red=cover.uncovered_red,
                n_red=cover.n_red,
            )
        )
        fam.total_phi += cover.uncovered_red
    return fam


def greedy_cover(g: Graph, col: Coloring) -> CoverFamily:
    """Fast valid (not necessarily optimal) cover: in every component with a
    single red vertex of degree at least 2, route one length-2 path through
    that red via its two smallest neighbors."""
    _, _, comps = rb_subgraph(g, col)
    colors = col.colors
    adj = g.adj
    fam = CoverFamily()
    for cid, cell in enumerate(comps):
        cell_set = set(cell)
        reds = [v for v in cell if colors[v] == RED]
        paths = ()
        covered = 0
        if len(reds) == 1:
            r = reds[0]
            nbrs = [w for w in adj[r] if w in cell_set]
            if len(nbrs) >= 2:
                a, b = sorted(nbrs)[:2]
                paths = ((a, r, b),)
                covered = 1
        fam.covers.append(
            PathCover(
                component_id=cid,
                vertices=tuple(cell),
                paths=paths,
                path_reds=tuple(1 for _ in paths),
                uncovered_red=len(reds) - covered,
                n_red=len(reds),
            )
        )
        fam.total_phi += len(reds) - covered
    return fam


def longest_cycle_upper_bound(g: Graph, col: Coloring, fam: CoverFamily) -> int:
    """n minus the total number of uncoverable red vertices.

    Requires a coloring with no red-black edge, and a nonempty black set:
    with no black vertices a cycle may live entirely inside one red/blue
    component and the bound argument does not apply.
    """
    colors = col.colors
    arr = g.edge_array
    if arr.shape[0]:
        a = colors[arr[:, 0]]
        b = colors[arr[:, 1]]
        if np.any(((a == RED) & (b == BLACK)) | ((a == BLACK) & (b == RED))):
            raise InvalidColoringError("coloring has a red-black edge")
    if not np.any(colors == BLACK):
        raise UnsupportedRegimeError(
            "empty strong core: the cycle upper bound does not apply"
        )
    return g.n - fam.total_phi


def extract_singles(fam: CoverFamily) -> list:
    """Paths covering exactly one red vertex, ordered by smallest vertex id."""
    singles = []
    for cover in fam.covers:
        for path, reds in zip(cover.paths, cover.path_reds):
            if reds == 1:
                singles.append(path)
    singles.sort(key=lambda p: (min(p), p))
    return singles
