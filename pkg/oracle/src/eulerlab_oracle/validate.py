"""Cross-validation of primary results against oracle fixtures."""

from __future__ import annotations

import json
from pathlib import Path

from .curves import OracleError


def _load_records(path) -> dict[str, dict]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise OracleError(f"{path}: expected a record or an array of records")
    out = {}
    for rec in obj:
        if "label" not in rec:
            raise OracleError(f"{path}: record without a label")
        out[rec["label"]] = rec
    return out


def _compare_seq(a, b, tol: float) -> dict:
    n = min(len(a), len(b))
    max_diff = 0.0
    argmax = None
    for i in range(n):
        d = abs(float(a[i]) - float(b[i]))
        if d > max_diff:
            max_diff, argmax = d, i
    return {
        "compared": n,
        "max_abs_diff": max_diff,
        "at_index": argmax,
        "pass": max_diff <= tol,
    }


def cross_validate(fixture_path, results_path, tol: float) -> dict:
    """Per-quantity comparison; passes iff every compared quantity is within tol."""
    oracle = _load_records(fixture_path)
    primary = _load_records(results_path)
    common = sorted(set(oracle) & set(primary))
    if not common:
        raise OracleError(
            f"no common labels between {sorted(oracle)} and {sorted(primary)}"
        )
    report = {"tol": tol, "curves": {}, "pass": True}
    for label in common:
        o, p = oracle[label], primary[label]
        entry = {}
        for scalar in ("conductor", "root_number", "rank"):
            if scalar in o and scalar in p:
                ok = o[scalar] == p[scalar]
                entry[scalar] = {"oracle": o[scalar], "primary": p[scalar], "pass": ok}
        for seq in ("l_derivs", "zeros"):
            if seq in o and seq in p:
                entry[seq] = _compare_seq(o[seq], p[seq], tol)
        bad = [k for k, v in entry.items() if not v["pass"]]
        entry["pass"] = not bad
        if bad:
            entry["failing"] = bad
            report["pass"] = False
        report["curves"][label] = entry
    return report
