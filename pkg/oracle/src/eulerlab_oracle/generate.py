"""OracleRequest handling and fixture emission."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

from mpmath import mpf, workdps

from .curves import OracleError, dirichlet_coefficients, resolve_curve
from .lseries import (
    LSeries,
    analytic_rank,
    coefficient_count,
    derivatives_at_center,
    derive_root_number,
    scan_zeros,
)


@dataclass(frozen=True)
class OracleRequest:
    curves: tuple
    t_max: float = 30.0
    precision: int = 50
    s_grid: tuple[float, ...] = ()

    def __post_init__(self):
        if self.precision < 30:
            raise OracleError(f"working precision must be >= 30 digits, got {self.precision}")
        if self.t_max > 50.0:
            raise OracleError(f"t_max must be <= 50, got {self.t_max}")

    @classmethod
    def from_json(cls, path) -> "OracleRequest":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        try:
            return cls(
                curves=tuple(obj["curves"]),
                t_max=float(obj.get("t_max", 30.0)),
                precision=int(obj.get("precision", 50)),
                s_grid=tuple(float(s) for s in obj.get("s_grid", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise OracleError(f"bad request file {path}: {exc}") from exc


def _to_float(x) -> float:
    """Round an mpf to binary64 (<= 17 significant decimal digits)."""
    return float(mpf(x))


def _progress(msg: str) -> None:
    print(f"[oracle] {msg}", file=sys.stderr, flush=True)


def build_record(spec, request: OracleRequest) -> tuple[dict, list]:
    curve = resolve_curve(spec)
    _progress(f"{curve.label}: coefficients")
    n_need = coefficient_count(curve.conductor, request.precision + 8)
    coeffs = dirichlet_coefficients(curve, n_need)
    w = derive_root_number(curve, coeffs)
    series = LSeries(curve, w, coeffs)
    _progress(f"{curve.label}: root number {w:+d}; derivatives at the centre")
    with workdps(request.precision):
        derivs = derivatives_at_center(series, 3)
        rank = analytic_rank(derivs)
    if w != (-1) ** rank:
        raise OracleError(
            f"{curve.label}: derived root number {w} contradicts rank {rank}"
        )
    _progress(f"{curve.label}: rank {rank}; zero scan to t = {request.t_max}")
    positive = scan_zeros(series, request.t_max)
    zeros = [0.0] * rank + [_to_float(g) for g in positive]
    record = {
        "label": curve.label,
        "ainvs": list(curve.ainvs),
        "conductor": curve.conductor,
        "root_number": int(w),
        "rank": int(rank),
        "l_derivs": [_to_float(d) for d in derivs],
        "zeros": zeros,
    }
    grid_rows = []
    if request.s_grid:
        with workdps(request.precision):
            for s in request.s_grid:
                grid_rows.append({"s": float(s), "L": _to_float(series.l_value(mpf(s)).real)})
    return record, grid_rows


def generate_fixtures(request: OracleRequest, out_path) -> Path:
    """Write the fixture JSON (and optional s-grid side file); deterministic."""
    out_path = Path(out_path)
    records = []
    grid = {}
    for spec in request.curves:
        rec, rows = build_record(spec, request)
        records.append(rec)
        if rows:
            grid[rec["label"]] = rows
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8", newline="\n")
    if grid:
        side = out_path.with_name(out_path.stem + "_lgrid.json")
        side.write_text(json.dumps(grid, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8", newline="\n")
    _progress(f"wrote {out_path} ({len(records)} records)")
    return out_path
