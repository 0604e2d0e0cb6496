"""Local approximations of the longest-cycle length and cycle-spectrum
probability formulas.

phi_k(v) looks only at the radius-k ball around v: the ball is peeled
locally (boundary vertices are never recolored), v's red/blue component is
solved exactly, and the result is normalized by the component size.  The
value is declared zero when the ball is implausibly large (per-level cap) or
contains a cycle, which keeps the quantity a function of a rooted tree.

Summing 1 - phi_k over the vertices yields a locality-k cycle-length
estimate; its normalized expectation is estimated by Monte Carlo over
independently sampled graphs.  Closed-form evaluators for the limiting
probability that cycles of prescribed lengths appear (and that all lengths
between girth and circumference appear) complete the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    InvalidParameterError,
    UnsupportedParameterError,
)
from .graph import Graph, Seed, as_seed, sample_gnp
from .oracle import count_cycles
from .pathcover import _solve_tree
from .strongcore import BLACK, BLUE, RED

__all__ = [
    "LocalValue",
    "EstimateReport",
    "local_phi_k",
    "l_cnk",
    "estimate_rho",
    "estimate_f",
    "weakly_pancyclic_prob",
    "spectrum_prob",
    "mc_spectrum",
]


@dataclass(frozen=True)
class LocalValue:
    """Exact rational local value with the rule that produced it."""

    value: Fraction
    reason: str  # black-center | cap-exceeded | cycle-found | computed

    def __post_init__(self):
        if self.reason != "computed" and self.value != 0:
            raise InvalidParameterError("non-computed local values must be zero")


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo estimate with its reproducibility context."""

    target: str
    estimate: float
    stderr: float
    trials: int
    n: int
    seed: int
    band: float | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "target": self.target,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "trials": self.trials,
            "n": self.n,
            "seed": self.seed,
            "params": dict(self.params),
        }
        if self.band is not None:
            out["band"] = self.band
        return out


def _ball_with_levels(g: Graph, v: int, k: int, c: float):
    """Level-by-level ball exploration.

    Returns ('cap-exceeded' | 'cycle-found', None) on early exit, else
    (None, (verts, depth, parent)) where verts lists the ball in BFS order.
    Levels are completed in order: the per-level size cap is checked when a
    level completes, and edges are examined while expanding the previous
    level, so the earliest triggered rule wins.
    """
    adj = g.adj
    depth = {v: 0}
    parent = {v: -1}
    level = [v]
    verts = [v]
    for d in range(1, k + 1):
        nxt = []
        for u in level:
            pu = parent[u]
            for w in adj[u]:
                if w == pu:
                    continue
                if w in depth:
                    return "cycle-found", None
                depth[w] = d
                parent[w] = u
                nxt.append(w)
                verts.append(w)
        # empty levels cannot trip the cap (degenerate at c = 0)
        if nxt and len(nxt) >= 10.0 * (c * k) ** (3 * d):
            return "cap-exceeded", None
        level = nxt
    # edges among the outermost level (inner levels were fully scanned)
    for u in level:
        pu = parent[u]
        for w in adj[u]:
            if w != pu and w in depth:
                return "cycle-found", None
    return None, (verts, depth, parent)


def local_phi_k(g: Graph, v: int, k: int, c: float) -> LocalValue:
    """Normalized uncovered-red contribution of v, computed from its
    radius-k ball only.

    Zero (with the matching reason) when some level i has at least
    10*(c*k)^(3i) vertices, when the ball spans a cycle, or when the local
    peeling leaves v black; otherwise phi of v's local red/blue component
    divided by the component size, as an exact rational.
    """
    if k < 1:
        raise InvalidParameterError("k must be at least 1")
    if not (0 <= v < g.n):
        raise InvalidParameterError("vertex out of range")
    reason, ball = _ball_with_levels(g, v, k, c)
    if reason is not None:
        return LocalValue(Fraction(0), reason)
    verts, depth, parent = ball
    # local peeling on the tree ball: only vertices strictly inside may be
    # recolored; boundary vertices stay black and only lend support.
    color = {u: BLACK for u in verts}
    children: dict = {u: [] for u in verts}
    for u in verts:
        if parent[u] != -1:
            children[parent[u]].append(u)

    def black_nbrs(u):
        cnt = 0
        if parent[u] != -1 and color[parent[u]] == BLACK:
            cnt += 1
        for w in children[u]:
            if color[w] == BLACK:
                cnt += 1
        return cnt

    queue = [u for u in verts if depth[u] < k]
    while queue:
        nxt = []
        changed = False
        for u in queue:
            if color[u] == RED:
                continue
            if black_nbrs(u) < 4:
                color[u] = RED
                changed = True
                for w in ([parent[u]] if parent[u] != -1 else []) + children[u]:
                    if color[w] == BLACK and depth[w] < k:
                        color[w] = BLUE
        if not changed:
            break
        queue = [u for u in verts if depth[u] < k and color[u] != RED]
    if color[v] == BLACK:
        return LocalValue(Fraction(0), "black-center")
    # v's component among non-black ball vertices (a subtree)
    comp = [v]
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in ([parent[u]] if parent[u] != -1 else []) + children[u]:
            if w not in seen and color[w] != BLACK:
                seen.add(w)
                stack.append(w)
                comp.append(w)
    local_id = {u: i for i, u in enumerate(comp)}
    adj_local = [[] for _ in comp]
    for u in comp:
        for w in children[u]:
            if w in local_id:
                adj_local[local_id[u]].append(local_id[w])
                adj_local[local_id[w]].append(local_id[u])
    colors_local = np.array([color[u] for u in comp], dtype=np.uint8)
    t = len(comp)
    nred = int(np.count_nonzero(colors_local == RED))
    if nred == 0:
        return LocalValue(Fraction(0), "computed")
    value, _ = _solve_tree(adj_local, colors_local, t + 1)
    covered = int(value // (t + 1))
    return LocalValue(Fraction(nred - covered, t), "computed")


def l_cnk(g: Graph, k: int, c: float) -> Fraction:
    """Exact rational n minus the sum of the local values over all vertices."""
    total = Fraction(0)
    for v in range(g.n):
        total += local_phi_k(g, v, k, c).value
    return Fraction(g.n) - total


def _mean_stderr(values) -> tuple:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def _rho_trial(args) -> float:
    c, k, n, master, t = args
    g = sample_gnp(n, c, Seed(master).child("trial", t))
    return float(l_cnk(g, k, c)) / n if n else 1.0


def _parallel_map(fn, jobs, threads):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def estimate_rho(c: float, k: int, n: int, trials: int, seed, threads: int = 1) -> EstimateReport:
    """Sample mean and standard error of (locality-k length estimate)/n over
    independent seeded graphs.  Trials use derived seeds, so the result is
    identical for any worker count."""
    if trials < 2:
        raise InvalidParameterError("need at least 2 trials")
    seed = as_seed(seed)
    jobs = [(c, k, n, seed.master, t) for t in range(trials)]
    vals = _parallel_map(_rho_trial, jobs, threads)
    mean, stderr = _mean_stderr(vals)
    return EstimateReport(
        target="rho",
        estimate=mean,
        stderr=stderr,
        trials=trials,
        n=n,
        seed=seed.master,
        params={"c": c, "k": k},
    )


def estimate_f(c: float, kmax: int, n: int, trials: int, seed, threads: int = 1) -> EstimateReport:
    """Scaling-limit estimate: the locality-kmax estimate plus an error band
    of stderr + 1/(2(kmax-1)) covering the locality truncation."""
    if kmax < 2:
        raise InvalidParameterError("kmax must be at least 2")
    rho = estimate_rho(c, kmax, n, trials, seed, threads=threads)
    band = rho.stderr + 1.0 / (2.0 * (kmax - 1))
    return EstimateReport(
        target="f",
        estimate=rho.estimate,
        stderr=rho.stderr,
        trials=trials,
        n=n,
        seed=rho.seed,
        band=band,
        params={"c": c, "kmax": kmax},
    )


def _cycle_rate(c: float, length: int) -> float:
    """c^length / (2*length), +inf on float overflow."""
    try:
        return c**length / (2.0 * length)
    except OverflowError:
        return math.inf


def spectrum_prob(c: float, lengths) -> float:
    """Limiting probability that a cycle of every requested length appears:
    the product over the lengths of (1 - exp(-c^len / (2 len)))."""
    if c < 0:
        raise InvalidParameterError("c must be nonnegative")
    out = 1.0
    for length in sorted(set(int(x) for x in lengths)):
        if length < 3:
            raise InvalidParameterError("cycle lengths start at 3")
        out *= 1.0 - math.exp(-_cycle_rate(c, length))
    return out


def weakly_pancyclic_prob(c: float, tol: float) -> float:
    """Limiting probability that every length between the shortest and the
    longest cycle occurs: sum over the girth g of
    prod_{l<g} exp(-rate_l) * prod_{l>=g} (1-exp(-rate_l)).

    Truncations are chosen so the total error stays below tol; requires
    c > 1 for the series to converge.
    """
    if c <= 1:
        raise UnsupportedParameterError("the series requires c > 1")
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    t = lambda l: math.exp(-_cycle_rate(c, l))

    # find K with a certified bound on sum_{l > K} t(l): extend until the
    # terms at least halve each step and the current term is tiny, then a
    # geometric comparison bounds the remainder by twice that term.
    budget = tol / 8.0
    K = 3
    while True:
        tK1 = t(K + 1)
        if tK1 == 0.0:
            tail_bound = 0.0
            break
        if tK1 <= 0.5 * t(K) and 2.0 * tK1 <= budget:
            # verify the halving persists numerically a few steps ahead
            ok = all(t(K + j + 1) <= 0.5 * t(K + j) or t(K + j + 1) == 0.0 for j in range(6))
            if ok:
                tail_bound = 2.0 * tK1
                break
        K += 1
        if K > 100000:
            raise UnsupportedParameterError("series truncation did not stabilize")

    # suffix products P(g) = prod_{l=g}^{K} (1 - t(l))
    suffix = [1.0] * (K + 3)
    for l in range(K, 2, -1):
        suffix[l] = suffix[l + 1] * (1.0 - t(l))

    total = 0.0
    prefix = 1.0  # prod_{l=3}^{g-1} t(l)
    g = 3
    while True:
        if g <= K:
            total += prefix * suffix[g]
        else:
            total += prefix
        prefix *= t(g)
        g += 1
        if prefix <= tol / 8.0 and (t(g) <= 0.5 or prefix == 0.0):
            # remaining girth terms are bounded by a geometric series
            break
        if g > 200000:
            raise UnsupportedParameterError("girth sum did not stabilize")
    return total


def _spectrum_trial(args):
    n, c, lengths, master, t = args
    g = sample_gnp(n, c, Seed(master).child("trial", t))
    return [count_cycles(g, l) for l in lengths]


def mc_spectrum(n: int, c: float, lengths, trials: int, seed, threads: int = 1) -> dict:
    """Empirical presence frequency and mean count per cycle length over
    independently sampled graphs."""
    lengths = sorted(set(int(x) for x in lengths))
    if any(l < 3 for l in lengths):
        raise InvalidParameterError("cycle lengths start at 3")
    if max(lengths, default=3) > 8:
        raise InvalidParameterError("exact counting supports lengths up to 8")
    if trials < 100:
        raise InvalidParameterError("need at least 100 trials")
    seed = as_seed(seed)
    jobs = [(n, c, tuple(lengths), seed.master, t) for t in range(trials)]
    rows = _parallel_map(_spectrum_trial, jobs, threads)
    present = {l: 0 for l in lengths}
    counts = {l: [] for l in lengths}
    for row in rows:
        for l, cnt in zip(lengths, row):
            counts[l].append(cnt)
            if cnt:
                present[l] += 1
    out = {}
    for l in lengths:
        mean, stderr = _mean_stderr(counts[l])
        out[l] = {
            "presence_frequency": present[l] / trials,
            "mean_count": mean,
            "count_stderr": stderr,
            "limit_presence": 1.0 - math.exp(-_cycle_rate(c, l)),
            "limit_mean": _cycle_rate(c, l),
        }
    return out
