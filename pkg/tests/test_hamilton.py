import math

import numpy as np
import pytest

from longcycle import (
    BLACK,
    Graph,
    InvalidParameterError,
    MergeParams,
    Seed,
    UnsupportedRegimeError,
    build_cover_family,
    build_gamma,
    cover_paths_via_matchings,
    cycle_of_deficiency,
    decompose,
    deficiency_sweep,
    extract_singles,
    longest_cycle,
    posa_merge,
    sample_gnp,
    strong_core_coloring,
    validate_cycle,
)
from longcycle.hamilton import HamiltonInstance, LongestCyclePipeline, default_p_prime
from longcycle.oracle import brute_longest_cycle

from conftest import complete_graph, cycle_graph


def pipeline_parts(g, seed=1, deficiency=0):
    col = strong_core_coloring(g, 4)
    fam = build_cover_family(g, col)
    gi = build_gamma(g, col, fam, deficiency)
    black_local = col.colors[gi.orig_ids] == BLACK
    inst = decompose(gi.base, black_local, seed)
    inst.forced = gi.forced
    return col, fam, gi, inst


# --- build_gamma -------------------------------------------------------------


def test_gamma_trivial_no_paths():
    k6 = complete_graph(6)
    col = strong_core_coloring(k6, 4)
    fam = build_cover_family(k6, col)
    gi = build_gamma(k6, col, fam, 0)
    assert gi.gamma.n == 6 and gi.forced == () and gi.gamma.m == 15


def test_gamma_single_path_contracts():
    from test_pathcover import blue_red_blue_gadget

    g = blue_red_blue_gadget()
    col = strong_core_coloring(g, 4)
    fam = build_cover_family(g, col)
    gi = build_gamma(g, col, fam, 0)
    # red interior 8 excluded; one forced edge between the blue endpoints
    assert len(gi.forced) == 1
    assert 8 in gi.excluded_interior
    assert gi.gamma.n == 8
    pair = gi.forced[0]
    assert gi.expansion[pair][1] == 8
    # dropping the only single-red path leaves nothing forced
    gi1 = build_gamma(g, col, fam, 1)
    assert gi1.forced == () and gi1.deficiency == 1
    with pytest.raises(InvalidParameterError):
        build_gamma(g, col, fam, 2)


def test_gamma_full_drop_consistency():
    g = sample_gnp(3000, 10, 17)
    col = strong_core_coloring(g, 4)
    fam = build_cover_family(g, col)
    singles = extract_singles(fam)
    all_paths = [p for p in fam.all_paths()]
    gi = build_gamma(g, col, fam, len(singles))
    assert len(gi.forced) == len(all_paths) - len(singles)


# --- decompose ---------------------------------------------------------------


def test_decompose_p_zero():
    g = sample_gnp(200, 10, 3)
    col = strong_core_coloring(g, 4)
    black = col.colors == BLACK
    inst = decompose(g, black, 1, p_prime=0.0)
    assert inst.reservoir == [] and inst.h_prime.m == g.m


def test_decompose_all_v1():
    # with no black vertices at all, every vertex lands in v1 and the
    # reservoir stays empty regardless of the coins
    g = sample_gnp(60, 3, 5)
    black = np.zeros(60, dtype=bool)
    inst = decompose(g, black, 1, p_prime=0.5)
    assert inst.reservoir == [] and len(inst.v1) == 60 and inst.h_prime.m == g.m


def test_decompose_partition():
    g = sample_gnp(5000, 12, 9)
    col = strong_core_coloring(g, 4)
    black = col.colors == BLACK
    inst = decompose(g, black, 7)
    hp_set = inst.h_prime.edge_set
    res_set = set(inst.reservoir) | {(b, a) for a, b in inst.reservoir}
    assert len(inst.reservoir) + inst.h_prime.m == g.m
    for (u, v) in inst.reservoir:
        assert (min(u, v), max(u, v)) not in hp_set
        assert u not in inst.v1 and v not in inst.v1
    # determinism
    inst2 = decompose(g, black, 7)
    assert inst2.reservoir == inst.reservoir


def test_decompose_size_bounds():
    # reservoir and v1 sizes against the analytic envelopes (logged check)
    n, c = 100000, 10.0
    base = Seed(60)
    loglog = math.log(math.log(n))
    for t in range(20):
        g = sample_gnp(n, c, base.child(t))
        col = strong_core_coloring(g, 4)
        gi_black = col.colors == BLACK
        inst = decompose(g, gi_black, base.child("d", t))
        assert len(inst.v1) <= 10 * n / loglog
        assert len(inst.reservoir) >= n / (1000 * loglog)


# --- cover paths -------------------------------------------------------------


def test_cover_paths_single_cycle_no_forced():
    c6 = cycle_graph(6)
    inst = HamiltonInstance(h_prime=c6, reservoir=[], v1=frozenset(), p_prime=0.0)
    paths, _ = cover_paths_via_matchings(inst)
    assert sum(len(p) for p in paths) == 6
    assert 1 <= len(paths) <= 2


def test_cover_paths_forced_edge_is_own_path():
    g = Graph(4, [(0, 1), (2, 3)])
    inst = HamiltonInstance(h_prime=g, reservoir=[], v1=frozenset(), p_prime=0.0, forced=((0, 1),))
    paths, _ = cover_paths_via_matchings(inst)
    pairs = {(min(a, b), max(a, b)) for p in paths for a, b in zip(p, p[1:])}
    assert (0, 1) in pairs
    covered = {v for p in paths for v in p}
    assert covered == {0, 1, 2, 3}


def test_cover_paths_bound_at_scale():
    n, c = 20000, 10.0
    base = Seed(61)
    limit = 4 * n / math.sqrt(math.log(n))
    for t in range(20):
        g = sample_gnp(n, c, base.child(t))
        col, fam, gi, inst = pipeline_parts(g, seed=base.child("s", t))
        paths, _ = cover_paths_via_matchings(inst)
        assert len(paths) <= limit
        covered = set()
        for p in paths:
            covered.update(p)
        assert len(covered) == inst.h_prime.n


# --- merge -------------------------------------------------------------------


def test_merge_immediate_closure():
    # one Hamilton path whose endpoints are adjacent: closes with no reveals
    c5 = cycle_graph(5)
    inst = HamiltonInstance(h_prime=c5, reservoir=[], v1=frozenset(), p_prime=0.0)
    res = posa_merge(inst, [[0, 1, 2, 3, 4]], 1)
    assert res.success and res.reveals_used == 0 and res.iterations == 1


def test_merge_rotation_closure_complete_graph():
    # endpoints not adjacent is impossible in K_n; remove one edge instead
    k6 = complete_graph(6)
    edges = [e for e in k6.edges() if e != (0, 5)]
    hp = Graph(6, edges)
    inst = HamiltonInstance(h_prime=hp, reservoir=[], v1=frozenset(), p_prime=0.0)
    res = posa_merge(inst, [[0, 1, 2, 3, 4, 5]], 1)
    assert res.success


def test_merge_respects_forced_and_connectors():
    g = sample_gnp(1000, 15, 21)
    res = longest_cycle(g, 21)
    assert res.success
    validate_cycle(g, res.cycle)


def test_merge_failure_reports():
    # two disjoint paths, empty reservoir, no way to join them
    g = Graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    inst = HamiltonInstance(h_prime=g, reservoir=[], v1=frozenset(), p_prime=0.0)
    res = posa_merge(inst, [[0, 1, 2], [3, 4, 5]], 1)
    assert not res.success
    assert res.reason == "reservoir exhausted"
    assert res.salvage_path is not None


# --- full pipeline -----------------------------------------------------------


def test_longest_cycle_k5():
    res = longest_cycle(complete_graph(5), 3)
    assert res.success and res.bound == 5 and res.achieved == 5


def test_longest_cycle_unsupported_regime():
    with pytest.raises(UnsupportedRegimeError):
        longest_cycle(cycle_graph(5), 1)


def test_small_n_bound_soundness_with_oracle():
    base = Seed(62)
    attempted = 0
    for t in range(400):
        g = sample_gnp(14, 5, base.child(t))
        col = strong_core_coloring(g, 4)
        if not col.black.size:
            continue
        res = longest_cycle(g, base.child("s", t))
        attempted += 1
        assert res.achieved <= res.bound
        assert brute_longest_cycle(g) <= res.bound
        if res.success:
            validate_cycle(g, res.cycle)
    assert attempted > 0


def test_regime_scale_run():
    g = sample_gnp(2000, 20, 31)
    res = longest_cycle(g, 31)
    assert res.success and res.achieved == res.bound
    validate_cycle(g, res.cycle)


def test_determinism():
    g = sample_gnp(1500, 12, 77)
    r1 = longest_cycle(g, 8)
    r2 = longest_cycle(g, 8)
    assert r1.cycle == r2.cycle and r1.reveals_used == r2.reveals_used


def test_cycle_of_deficiency_contract():
    g = sample_gnp(4000, 10, 55)
    pipe = LongestCyclePipeline(g, 55)
    assert pipe.max_deficiency >= 2
    for i in (0, 1, pipe.max_deficiency):
        res = pipe.run(i)
        assert res.success and res.achieved == res.bound - i
        validate_cycle(g, res.cycle)
    with pytest.raises(InvalidParameterError):
        cycle_of_deficiency(g, 55, pipe.max_deficiency + 1)


def test_deficiency_sweep_matches_individual_runs():
    # the sweep reuses heavy stages (warm-started matchings may differ from
    # cold ones), so compare the contract, not the vertex order
    g = sample_gnp(3000, 10, 101)
    swept = deficiency_sweep(g, 9, [0, 1])
    solo0 = cycle_of_deficiency(g, 9, 0)
    solo1 = cycle_of_deficiency(g, 9, 1)
    assert swept[0].cycle == solo0.cycle  # first run is identical cold/warm
    for res, solo in zip(swept, (solo0, solo1)):
        assert res.success == solo.success
        assert res.bound == solo.bound
        assert res.achieved == solo.achieved
    validate_cycle(g, swept[1].cycle)


def test_p_prime_guard():
    # tiny n: the log-log factor clamps to 1, leaving the in-regime 1/c
    assert default_p_prime(20.0, 5) == pytest.approx(1 / 20)
    assert default_p_prime(0.5, 5) == 0.5  # never above one half
    assert 0 < default_p_prime(20.0, 10**5) < 0.05
