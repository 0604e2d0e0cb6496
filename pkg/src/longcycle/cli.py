"""Command-line surface.

Every subcommand prints a machine-readable JSON envelope on stdout
({schema_version, subcommand, params, result}) and a one-line human summary
on stderr.  Exit codes: 0 success, 1 expected algorithmic failure (e.g. the
merge exhausted its reservoir, or a validation check failed), 2 invalid
parameters or usage.  All randomness flows from --seed through derived
streams; --manifest appends a replayable record of the run.
"""

from __future__ import annotations

import argparse
import csv as _csv
import json
import os
import sys

import numpy as np

from . import manifest as manifest_mod
from .errors import LongCycleError
from .graph import Graph, Seed, read_edge_list, sample_gnp, write_edge_list
from .hamilton import LongestCyclePipeline, MergeParams, longest_cycle
from .oracle import brute_longest_cycle, brute_longest_path, cycle_spectrum
from .pathcover import build_cover_family, extract_singles, longest_cycle_upper_bound
from .strongcore import (
    check_red_fraction,
    component_stats,
    strong_core_coloring,
    verify_strong_core,
)

SCHEMA_VERSION = 1


def _threads_default() -> int:
    env = os.environ.get("LONGCYCLE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _load_graph(args) -> Graph:
    if getattr(args, "infile", None):
        return read_edge_list(args.infile)
    if args.n is None or args.c is None or args.seed is None:
        raise LongCycleError("need either --in FILE or all of --n/--c/--seed")
    return sample_gnp(args.n, args.c, Seed(args.seed))


# --- subcommand implementations (pure: params dict -> result dict) ---------


def run_sample(params: dict) -> dict:
    g = sample_gnp(params["n"], params["c"], Seed(params["seed"]))
    if params.get("out"):
        write_edge_list(g, params["out"])
    return {"n": g.n, "m": g.m, "seed": params["seed"]}


def run_core(params: dict) -> dict:
    if params.get("infile"):
        g = read_edge_list(params["infile"])
    else:
        g = sample_gnp(params["n"], params["c"], Seed(params["seed"]))
    col = strong_core_coloring(g, params.get("k", 4))
    stats = component_stats(g, col)
    result = {
        "n": g.n,
        "m": g.m,
        "histogram": col.histogram(),
        "component_size_counts": {str(k): v for k, v in sorted(stats.x.items())},
        "red_multiplicity_counts": {str(k): v for k, v in sorted(stats.y.items())},
        "reds_in_multired_components": stats.y_multi,
        "largest_component": stats.largest,
    }
    if params.get("csv"):
        with open(params["csv"], "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["table", "index", "count"])
            for k, v in sorted(stats.x.items()):
                w.writerow(["component_size", k, v])
            for k, v in sorted(stats.y.items()):
                w.writerow(["red_multiplicity", k, v])
    return result


def run_cover(params: dict) -> dict:
    if params.get("infile"):
        g = read_edge_list(params["infile"])
    else:
        g = sample_gnp(params["n"], params["c"], Seed(params["seed"]))
    col = strong_core_coloring(g, params.get("k", 4))
    fam = build_cover_family(g, col)
    singles = extract_singles(fam)
    comps = [
        {
            "component": cover.component_id,
            "size": len(cover.vertices),
            "reds": cover.n_red,
            "uncovered": cover.uncovered_red,
            "paths": [list(p) for p in cover.paths],
        }
        for cover in fam.covers
    ]
    return {
        "n": g.n,
        "total_phi": fam.total_phi,
        "single_red_paths": len(singles),
        "components": comps,
    }


def run_longest_cycle(params: dict) -> dict:
    g = sample_gnp(params["n"], params["c"], Seed(params["seed"]))
    pipe = LongestCyclePipeline(g, Seed(params["seed"]))
    deficiency = params.get("deficiency", 0)
    res = pipe.run(deficiency, want_trace=bool(params.get("trace")))
    if params.get("trace"):
        with open(params["trace"], "w") as fh:
            for entry in res.trace:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return {
        "n": g.n,
        "bound": res.bound,
        "achieved": res.achieved,
        "success": res.success,
        "deficiency": deficiency,
        "retries": res.retries,
        "reservoir_used": res.reveals_used,
        "cycle": list(res.cycle) if res.cycle else None,
    }


def run_oracle(params: dict) -> dict:
    g = read_edge_list(params["infile"])
    spectrum = cycle_spectrum(g)
    return {
        "n": g.n,
        "m": g.m,
        "longest_cycle": brute_longest_cycle(g),
        "longest_path_edges": brute_longest_path(g),
        "cycle_counts": {str(k): v for k, v in sorted(spectrum.counts.items())},
        "lengths_present": sorted(spectrum.present),
    }


def run_estimate(params: dict, threads: int = 1) -> dict:
    from . import estimator

    target = params["target"]
    if target == "rho":
        rep = estimator.estimate_rho(
            params["c"], params["k"], params["n"], params["trials"],
            Seed(params["seed"]), threads=threads,
        )
        result = rep.to_dict()
    elif target == "f":
        rep = estimator.estimate_f(
            params["c"], params["kmax"], params["n"], params["trials"],
            Seed(params["seed"]), threads=threads,
        )
        result = rep.to_dict()
    elif target == "pancyclic":
        value = estimator.weakly_pancyclic_prob(params["c"], params.get("tol", 1e-9))
        result = {"target": "pancyclic", "c": params["c"], "value": value}
    elif target == "spectrum":
        value = estimator.spectrum_prob(params["c"], params["lengths"])
        result = {
            "target": "spectrum",
            "c": params["c"],
            "lengths": sorted(params["lengths"]),
            "value": value,
        }
    elif target == "mc-spectrum":
        table = estimator.mc_spectrum(
            params["n"], params["c"], params["lengths"], params["trials"],
            Seed(params["seed"]), threads=threads,
        )
        result = {
            "target": "mc-spectrum",
            "per_length": {str(k): v for k, v in table.items()},
        }
    else:
        raise LongCycleError(f"unknown estimate target {target!r}")
    if params.get("csv"):
        _append_estimate_csv(params["csv"], params, result)
    return result


def _append_estimate_csv(path: str, params: dict, result: dict) -> None:
    exists = os.path.exists(path)
    with open(path, "a", newline="") as fh:
        w = _csv.writer(fh)
        if not exists:
            w.writerow(["target", "c", "k", "n", "trials", "estimate", "stderr", "band"])
        w.writerow(
            [
                params["target"],
                params.get("c"),
                params.get("k") or params.get("kmax"),
                params.get("n"),
                params.get("trials"),
                result.get("estimate", result.get("value")),
                result.get("stderr"),
                result.get("band"),
            ]
        )


def run_spectrum(params: dict) -> dict:
    from . import estimator

    if params.get("pancyclic"):
        value = estimator.weakly_pancyclic_prob(params["c"], params.get("tol", 1e-9))
        return {"kind": "pancyclic", "c": params["c"], "value": value}
    value = estimator.spectrum_prob(params["c"], params["lengths"])
    return {
        "kind": "lengths",
        "c": params["c"],
        "lengths": sorted(params["lengths"]),
        "value": value,
    }


def run_validate(params: dict) -> dict:
    g = read_edge_list(params["infile"])
    k = params.get("k", 4)
    col = strong_core_coloring(g, k)
    checks = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except LongCycleError as exc:
            ok, detail = False, str(exc)
        checks.append({"name": name, "passed": bool(ok), "detail": detail})

    deg_sum = int(g.degrees.sum())
    check("degree-edge-consistency", lambda: (deg_sum == 2 * g.m, f"sum deg {deg_sum} vs 2m {2 * g.m}"))
    check(
        "core-fixpoint",
        lambda: (
            verify_strong_core(g, col.black.tolist(), k),
            f"|black|={col.black.size}",
        ),
    )
    check(
        "red-black-separation",
        lambda: (
            not _has_red_black_edge(g, col),
            "no red-black edge" if not _has_red_black_edge(g, col) else "red-black edge found",
        ),
    )
    check(
        "component-red-fraction",
        lambda: (check_red_fraction(g, col), "every component has >= 1/4 reds"),
    )
    if g.n <= 18 and col.black.size:
        def bound_check():
            fam = build_cover_family(g, col)
            bound = longest_cycle_upper_bound(g, col, fam)
            real = brute_longest_cycle(g)
            return real <= bound, f"brute {real} <= bound {bound}"

        check("cycle-upper-bound", bound_check)
    passed = all(c["passed"] for c in checks)
    return {"n": g.n, "m": g.m, "passed": passed, "checks": checks}


def _has_red_black_edge(g: Graph, col) -> bool:
    from .strongcore import BLACK, RED

    arr = g.edge_array
    if not arr.shape[0]:
        return False
    a = col.colors[arr[:, 0]]
    b = col.colors[arr[:, 1]]
    return bool(np.any(((a == RED) & (b == BLACK)) | ((a == BLACK) & (b == RED))))


def run_replay(params: dict) -> dict:
    entry = manifest_mod.get_entry(params["manifest"], params["index"])
    sub = entry["subcommand"]
    fn = _RUNNERS.get(sub)
    if fn is None:
        raise LongCycleError(f"cannot replay subcommand {sub!r}")
    result = fn(dict(entry["params"]))
    digest = manifest_mod.result_digest(sub, entry["params"], result)
    return {
        "subcommand": sub,
        "index": params["index"],
        "expected_digest": entry["digest"],
        "actual_digest": digest,
        "match": digest == entry["digest"],
    }


_RUNNERS = {
    "sample": run_sample,
    "core": run_core,
    "cover": run_cover,
    "longest-cycle": run_longest_cycle,
    "oracle": run_oracle,
    "estimate": run_estimate,
    "spectrum": run_spectrum,
    "validate": run_validate,
}


# --- argument parsing -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="longcycle",
        description="Longest cycles in sparse random graphs: sampling, core "
        "coloring, path covers, cycle construction, and estimators.",
    )
    p.add_argument("--threads", type=int, default=_threads_default(),
                   help="worker cap for parallel trials (results are thread-count independent)")
    p.add_argument("--manifest", help="append a replayable record of this run to FILE")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add_graph_args(sp, need_seed=True):
        sp.add_argument("--n", type=int)
        sp.add_argument("--c", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--in", dest="infile", help="edge-list file instead of sampling")

    sp = sub.add_parser("sample", help="sample a random graph, optionally writing an edge list")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", help="write the edge list here")

    sp = sub.add_parser("core", help="strong-core coloring and component statistics")
    add_graph_args(sp)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--csv", help="write the component tables as CSV")

    sp = sub.add_parser("cover", help="exact per-component path covers")
    add_graph_args(sp)
    sp.add_argument("--k", type=int, default=4)

    sp = sub.add_parser("longest-cycle", help="construct a longest cycle with certificate")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--deficiency", type=int, default=0)
    sp.add_argument("--trace", help="write a JSONL rotation trace here")

    sp = sub.add_parser("oracle", help="exact brute-force answers for a small edge-list file")
    sp.add_argument("--in", dest="infile", required=True)

    sp = sub.add_parser("estimate", help="Monte Carlo estimators and formula evaluation")
    sp.add_argument("--target", required=True,
                    choices=["rho", "f", "pancyclic", "spectrum", "mc-spectrum"])
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--kmax", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--lengths", help="comma-separated cycle lengths, e.g. 3,4,5")
    sp.add_argument("--csv", help="append the estimate to this CSV file")

    sp = sub.add_parser("spectrum", help="closed-form cycle-spectrum probabilities")
    sp.add_argument("--c", type=float, required=True)
    sp.add_argument("--lengths", help="comma-separated cycle lengths")
    sp.add_argument("--pancyclic", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("validate", help="run deterministic invariants on an edge-list file")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--k", type=int, default=4)

    sp = sub.add_parser("replay", help="re-execute a manifest entry and compare digests")
    sp.add_argument("--manifest", dest="replay_manifest", required=True)
    sp.add_argument("--index", type=int, required=True)
    return p


def _params_from_args(args) -> dict:
    sub = args.subcommand
    if sub == "sample":
        params = {"n": args.n, "c": args.c, "seed": args.seed}
        if args.out:
            params["out"] = args.out
    elif sub in ("core", "cover"):
        params = {"k": args.k}
        if args.infile:
            params["infile"] = args.infile
        else:
            params.update({"n": args.n, "c": args.c, "seed": args.seed})
        if sub == "core" and args.csv:
            params["csv"] = args.csv
    elif sub == "longest-cycle":
        params = {
            "n": args.n,
            "c": args.c,
            "seed": args.seed,
            "deficiency": args.deficiency,
        }
        if args.trace:
            params["trace"] = args.trace
    elif sub == "oracle":
        params = {"infile": args.infile}
    elif sub == "estimate":
        params = {"target": args.target, "c": args.c, "seed": args.seed, "tol": args.tol}
        for key in ("k", "kmax", "n", "trials"):
            val = getattr(args, key)
            if val is not None:
                params[key] = val
        if args.lengths:
            params["lengths"] = [int(x) for x in args.lengths.split(",") if x]
        if args.csv:
            params["csv"] = args.csv
        _check_estimate_params(params)
    elif sub == "spectrum":
        params = {"c": args.c, "tol": args.tol}
        if args.pancyclic:
            params["pancyclic"] = True
        else:
            if not args.lengths:
                raise LongCycleError("spectrum needs --lengths or --pancyclic")
            params["lengths"] = [int(x) for x in args.lengths.split(",") if x]
    elif sub == "validate":
        params = {"infile": args.infile, "k": args.k}
    elif sub == "replay":
        params = {"manifest": args.replay_manifest, "index": args.index}
    else:  # pragma: no cover
        raise LongCycleError(f"unknown subcommand {sub!r}")
    return params


def _check_estimate_params(params: dict) -> None:
    target = params["target"]
    need = {
        "rho": ("k", "n", "trials"),
        "f": ("kmax", "n", "trials"),
        "mc-spectrum": ("n", "trials", "lengths"),
        "spectrum": ("lengths",),
        "pancyclic": (),
    }[target]
    missing = [k for k in need if k not in params]
    if missing:
        raise LongCycleError(f"estimate --target {target} needs {', '.join('--' + m for m in missing)}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    sub = args.subcommand
    try:
        params = _params_from_args(args)
        if sub == "replay":
            result = run_replay(params)
        elif sub == "estimate":
            result = run_estimate(params, threads=max(1, args.threads))
        else:
            result = _RUNNERS[sub](params)
    except LongCycleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": sub,
        "params": params,
        "result": result,
    }
    print(json.dumps(envelope, sort_keys=True))
    _summary(sub, result)
    if args.manifest and sub != "replay":
        manifest_mod.append_run(args.manifest, sub, params, result)
    if sub == "longest-cycle" and not result["success"]:
        return 1
    if sub == "validate" and not result["passed"]:
        return 1
    if sub == "replay" and not result["match"]:
        return 1
    return 0


def _summary(sub: str, result: dict) -> None:
    if sub == "sample":
        msg = f"sampled n={result['n']} m={result['m']}"
    elif sub == "core":
        msg = f"coloring {result['histogram']}, largest r/b component {result['largest_component']}"
    elif sub == "cover":
        msg = f"total uncovered reds {result['total_phi']}, single-red paths {result['single_red_paths']}"
    elif sub == "longest-cycle":
        msg = (
            f"bound {result['bound']} achieved {result['achieved']} "
            f"({'ok' if result['success'] else 'FAILED'})"
        )
    elif sub == "oracle":
        msg = f"longest cycle {result['longest_cycle']}, longest path {result['longest_path_edges']} edges"
    elif sub in ("estimate", "spectrum"):
        msg = f"value {result.get('estimate', result.get('value'))}"
    elif sub == "validate":
        bad = [c["name"] for c in result["checks"] if not c["passed"]]
        msg = "all checks passed" if result["passed"] else f"FAILED: {', '.join(bad)}"
    elif sub == "replay":
        msg = "digest match" if result["match"] else "digest MISMATCH"
    else:  # pragma: no cover
        msg = "done"
    print(msg, file=sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())
