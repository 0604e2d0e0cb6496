"""Experiment manifests: each run records its parameters, seed, and a digest of
the result body, so any entry can be replayed and byte-compared later."""

from __future__ import annotations

import hashlib
import json
import os
import time

from .errors import InvalidParameterError

SCHEMA_VERSION = 1


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def result_digest(subcommand: str, params: dict, result: dict) -> str:
    body = {"subcommand": subcommand, "params": params, "result": result}
    return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()


def load_manifest(path: str) -> dict:
    if not os.path.exists(path):
        return {"schema_version": SCHEMA_VERSION, "runs": []}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise InvalidParameterError(
            f"manifest schema {data.get('schema_version')!r} unsupported"
        )
    return data


def append_run(path: str, subcommand: str, params: dict, result: dict) -> dict:
    entry = {
        "subcommand": subcommand,
        "params": params,
        "seed": params.get("seed"),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "digest": result_digest(subcommand, params, result),
    }
    data = load_manifest(path)
    data["runs"].append(entry)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return entry


def get_entry(path: str, index: int) -> dict:
    data = load_manifest(path)
    runs = data["runs"]
    if not (0 <= index < len(runs)):
        raise InvalidParameterError(
            f"manifest has {len(runs)} runs; index {index} missing"
        )
    return runs[index]
