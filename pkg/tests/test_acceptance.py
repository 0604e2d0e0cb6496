"""Acceptance gate: every criterion below prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines and the
timings.  Criteria use fixed seeds; tolerances are stated inline.
"""

import math
import time

import numpy as np
import pytest

from longcycle import (
    BLACK,
    RED,
    LongestCyclePipeline,
    Seed,
    brute_longest_cycle,
    brute_phi,
    build_cover_family,
    check_red_fraction,
    estimate_rho,
    extract_singles,
    induced_subgraph,
    l_cnk,
    longest_cycle_upper_bound,
    matching_number_brute,
    maximum_matching,
    mc_spectrum,
    odd_components,
    rb_subgraph,
    sample_gnp,
    spectrum_prob,
    strong_core_coloring,
    tutte_berge_witness,
    verify_strong_core,
    weakly_pancyclic_prob,
)

_qualifying_cache = {}


def _report(num, name, passed, detail):
    line = f"ACCEPTANCE {num:02d} [{'PASS' if passed else 'FAIL'}] {name}: {detail}"
    print(f"\n{line}")
    assert passed, line


def _qualifying(small_corpus):
    """Corpus instances with a nonempty black set, with their coloring,
    exact cover family, and upper bound (computed once)."""
    if "data" not in _qualifying_cache:
        rows = []
        for i, n, c, g in small_corpus:
            col = strong_core_coloring(g, 4)
            if not col.black.size:
                continue
            fam = build_cover_family(g, col)
            bound = longest_cycle_upper_bound(g, col, fam)
            rows.append((i, g, col, fam, bound))
        _qualifying_cache["data"] = rows
    return _qualifying_cache["data"]


def test_criterion_01_upper_bound_soundness(small_corpus):
    """Deterministic bound: brute longest cycle never exceeds n - total_phi
    on any qualifying instance; zero tolerance; under 2 minutes."""
    t0 = time.time()
    rows = _qualifying(small_corpus)
    violations = 0
    for i, g, col, fam, bound in rows:
        if brute_longest_cycle(g) > bound:
            violations += 1
    elapsed = time.time() - t0
    _report(
        1,
        "upper-bound soundness",
        violations == 0 and elapsed < 120,
        f"{len(rows)} qualifying of {len(small_corpus)}, {violations} violations, {elapsed:.1f}s",
    )


def test_criterion_02_phi_solver_exactness(small_corpus):
    """Exact solver equals exhaustive enumeration on every red/blue
    component of the qualifying corpus; under 2 minutes."""
    t0 = time.time()
    rows = _qualifying(small_corpus)
    compared = 0
    mismatches = 0
    for i, g, col, fam, bound in rows:
        _, _, comps = rb_subgraph(g, col)
        for cell in comps:
            if len(cell) > 14:
                continue
            sub, idx = induced_subgraph(g, cell)
            local = col.colors[idx]
            phi, _ = brute_phi(sub, local)
            cover = next(c for c in fam.covers if set(c.vertices) == set(cell))
            if cover.uncovered_red != phi:
                mismatches += 1
            compared += 1
    elapsed = time.time() - t0
    _report(
        2,
        "phi-solver exactness",
        mismatches == 0 and elapsed < 120,
        f"{compared} components compared, {mismatches} mismatches, {elapsed:.1f}s",
    )


def test_criterion_03_strong_core_correctness(small_corpus):
    """(i) 100 random schedules agree; (ii) exhaustive maximality for
    n <= 10; (iii) quarter-red rule; (iv) no red-black edge."""
    t0 = time.time()
    rng = np.random.default_rng(123)
    fails = {"orders": 0, "maximal": 0, "red_fraction": 0, "red_black": 0}
    for i, n, c, g in small_corpus:
        col = strong_core_coloring(g, 4)
        base_black = frozenset(col.black.tolist())
        for _ in range(100):
            alt = strong_core_coloring(g, 4, order=rng.permutation(n).tolist())
            if frozenset(alt.black.tolist()) != base_black:
                fails["orders"] += 1
                break
        if n <= 10:
            adjbit = [0] * n
            for u, v in g.edges():
                adjbit[u] |= 1 << v
                adjbit[v] |= 1 << u
            black_mask = 0
            for v in base_black:
                black_mask |= 1 << v
            for mask in range(1 << n):
                closed = mask
                for v in range(n):
                    if adjbit[v] & mask:
                        closed |= 1 << v
                ok = True
                mm = closed
                while mm:
                    v = (mm & -mm).bit_length() - 1
                    mm &= mm - 1
                    if (adjbit[v] & mask).bit_count() < 4:
                        ok = False
                        break
                if ok and (mask | black_mask) != black_mask:
                    fails["maximal"] += 1
                    break
            if not verify_strong_core(g, base_black, 4):
                fails["maximal"] += 1
        if not check_red_fraction(g, col):
            fails["red_fraction"] += 1
        colors = col.colors
        for u, v in g.edges():
            pair = {colors[u], colors[v]}
            if pair == {RED, BLACK}:
                fails["red_black"] += 1
                break
    elapsed = time.time() - t0
    total = sum(fails.values())
    _report(
        3,
        "strong-core correctness",
        total == 0,
        f"failures {fails}, {elapsed:.1f}s",
    )


def test_criterion_04_end_to_end_regime():
    """20 constructions at (n=2000, c=20): at least 19 reach the bound,
    each under 60 s.  Plus 10 informational runs at (n=1e5, c=10)."""
    t0 = time.time()
    ok = 0
    slow = 0
    base = Seed(40400)
    for t in range(20):
        g = sample_gnp(2000, 20, base.child("g", t))
        ta = time.time()
        pipe = LongestCyclePipeline(g, base.child("s", t))
        res = pipe.run(0)
        wall = time.time() - ta
        if wall >= 60:
            slow += 1
        if res.success and res.achieved == res.bound:
            ok += 1
    regime_passed = ok >= 19 and slow == 0
    detail = f"regime: {ok}/20 reached the bound, {slow} over 60s"

    ratios = []
    for t in range(10):
        g = sample_gnp(100000, 10, base.child("big", t))
        pipe = LongestCyclePipeline(g, base.child("bs", t))
        res = pipe.run(0)
        ratios.append(res.achieved / res.bound)
    detail += (
        f"; informational n=1e5 c=10 achieved/bound: "
        f"min {min(ratios):.6f} mean {np.mean(ratios):.6f}"
    )
    _report(4, "end-to-end construction", regime_passed, detail + f", {time.time()-t0:.0f}s total")


def test_criterion_05_deficiency_range():
    """On 5 instances (n=1e5, c=10) with at least 10 single-red paths,
    every deficiency i in 0..min(singles, 50) yields a validated cycle of
    exactly bound - i vertices."""
    t0 = time.time()
    base = Seed(50500)
    instances = 0
    runs = 0
    failures = 0
    seed_idx = 0
    while instances < 5:
        g = sample_gnp(100000, 10, base.child("g", seed_idx))
        pipe = LongestCyclePipeline(g, base.child("s", seed_idx))
        seed_idx += 1
        if pipe.max_deficiency < 10:
            continue
        instances += 1
        top = min(pipe.max_deficiency, 50)
        for i in range(top + 1):
            res = pipe.run(i)
            runs += 1
            if not (res.success and res.achieved == res.bound - i):
                failures += 1
    elapsed = time.time() - t0
    _report(
        5,
        "deficiency range construction",
        failures == 0,
        f"{instances} instances, {runs} cycles built and validated, "
        f"{failures} failures, {elapsed:.0f}s",
    )


def test_criterion_06_local_approximation():
    """|locality-k estimate - upper bound| <= n/(4k^2) + n^0.7 on at least
    9 of 10 graphs at (n=5e4, c=20) for each k in {2, 3}."""
    t0 = time.time()
    n, c = 50000, 20.0
    base = Seed(60600)
    ok = {2: 0, 3: 0}
    for t in range(10):
        g = sample_gnp(n, c, base.child(t))
        pipe = LongestCyclePipeline(g, base.child("s", t))
        for k in (2, 3):
            slack = n / (4 * k * k) + n**0.7
            if abs(float(l_cnk(g, k, c)) - pipe.bound) <= slack:
                ok[k] += 1
    passed = ok[2] >= 9 and ok[3] >= 9
    _report(
        6,
        "local approximation",
        passed,
        f"within slack: k=2 {ok[2]}/10, k=3 {ok[3]}/10, {time.time()-t0:.0f}s",
    )


def test_criterion_07_cauchy_property():
    """Locality estimates at k=2 and k=3 differ by at most 1/8 plus three
    combined standard errors (c=20, n=5e4, 30 trials)."""
    t0 = time.time()
    rep2 = estimate_rho(20.0, 2, 50000, 30, Seed(70700))
    rep3 = estimate_rho(20.0, 3, 50000, 30, Seed(70700))
    gap = abs(rep2.estimate - rep3.estimate)
    allowed = 1 / 8 + 3 * (rep2.stderr + rep3.stderr)
    _report(
        7,
        "locality Cauchy property",
        gap <= allowed,
        f"|rho2-rho3| = {gap:.2e} <= {allowed:.3f}, {time.time()-t0:.0f}s",
    )


def test_criterion_08_poisson_cycle_limit():
    """Presence frequency at (c=3, l=3) within 0.03 of the limit, and mean
    counts at (c=1.5, l in {3,4,5}) within 10 percent; n=3000, 2000 trials,
    under 10 minutes."""
    t0 = time.time()
    table3 = mc_spectrum(3000, 3.0, [3], 2000, Seed(80800))
    freq = table3[3]["presence_frequency"]
    limit = 1 - math.exp(-4.5)
    ok = abs(freq - limit) <= 0.03
    detail = f"presence(c=3,l=3) {freq:.4f} vs {limit:.4f}"

    table15 = mc_spectrum(3000, 1.5, [3, 4, 5], 2000, Seed(80801))
    for l in (3, 4, 5):
        mean = table15[l]["mean_count"]
        target = 1.5**l / (2 * l)
        ok = ok and abs(mean - target) <= 0.1 * target
        detail += f"; mean(l={l}) {mean:.3f} vs {target:.3f}"
    elapsed = time.time() - t0
    _report(8, "Poisson cycle-count limit", ok and elapsed < 600, detail + f", {elapsed:.0f}s")


def test_criterion_09_formula_evaluators():
    """Closed forms agree with a 200-digit evaluation to 1e-9, and the
    c=20 value is within 1e-9 of 1."""
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 200

    def oracle_pancyclic(c, terms=400):
        cc = mp.mpf(c)
        t = lambda l: mp.e ** (-(cc**l) / (2 * l))
        total = mp.mpf(0)
        for k in range(3, terms):
            pre = mp.mpf(1)
            for l in range(3, k):
                pre *= t(l)
            if pre < mp.mpf(10) ** -60:
                break
            prod = mp.mpf(1)
            for l in range(k, terms):
                prod *= 1 - t(l)
            total += pre * prod
        return total

    v2 = weakly_pancyclic_prob(2.0, 1e-9)
    diff2 = abs(mp.mpf(v2) - oracle_pancyclic(2.0))
    v20 = weakly_pancyclic_prob(20.0, 1e-9)

    def oracle_spectrum(c, lengths):
        out = mp.mpf(1)
        for l in lengths:
            out *= 1 - mp.e ** (-(mp.mpf(c) ** l) / (2 * l))
        return out

    sp = spectrum_prob(2.0, {3, 4, 5, 6})
    diff_sp = abs(mp.mpf(sp) - oracle_spectrum(2.0, [3, 4, 5, 6]))
    ok = diff2 < mp.mpf(1e-9) and diff_sp < mp.mpf(1e-9) and abs(v20 - 1) < 1e-9
    _report(
        9,
        "formula evaluators",
        ok,
        f"pancyclic(2) diff {float(diff2):.1e}, spectrum diff {float(diff_sp):.1e}, "
        f"1-pancyclic(20) = {1 - v20:.1e}",
    )


def test_criterion_10_matching_certificates():
    """Maximum matching equals brute force on 500 small graphs, each with
    an exhibited witness set attaining the matching-number formula."""
    t0 = time.time()
    base = Seed(10100)
    bad = 0
    for t in range(500):
        n = 4 + t % 9  # 4..12
        g = sample_gnp(n, min(2.0 + (t % 7) * 0.5, float(n)), base.child(t))
        size = len(maximum_matching(g))
        if size != matching_number_brute(g):
            bad += 1
            continue
        u = tutte_berge_witness(g, size)
        if u is None or len(u) - odd_components(g, u) + g.n != 2 * size:
            bad += 1
    _report(
        10,
        "matching certificates",
        bad == 0,
        f"500 graphs, {bad} failures, {time.time()-t0:.0f}s",
    )
