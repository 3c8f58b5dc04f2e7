"""Fixture ingestion, validation, and result persistence.

Fixture schema (JSON array or JSON lines), one record per curve:

    {"label": str, "ainvs": [int;5], "conductor": int, "root_number": int,
     "rank": int, "l_derivs": [float], "zeros": [float]}

zeros are ascending nonnegative critical-line ordinates with gamma = 0
listed rank-many times. All numeric output uses 17 significant digits and
LF line endings so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .curves import ApTable, CurveModel
from .errors import InputError, ParseError, ValidationError
from .lfunction import LSpecialValues, ZeroList

ENV_DATA = "EULERLAB_DATA"
_BUNDLED = Path(__file__).parent / "data" / "curves.json"

_FIELDS = {
    "label": str,
    "ainvs": list,
    "conductor": int,
    "root_number": int,
    "rank": int,
    "l_derivs": list,
    "zeros": list,
}


@dataclass(frozen=True)
class CurveRecord:
    """One externally sourced curve: inputs plus reference L-data."""

    label: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int
    root_number: int
    rank: int
    l_derivs: tuple[float, ...]
    zeros: tuple[float, ...]
    flags: tuple[str, ...] = ()

    def to_model(self) -> CurveModel:
        a1, a2, a3, a4, a6 = self.ainvs
        return CurveModel(a1, a2, a3, a4, a6, self.conductor, self.root_number, self.label)

    def zero_list(self) -> ZeroList:
        return ZeroList.from_ordinates(self.zeros)

    def special_values(self) -> LSpecialValues:
        return LSpecialValues(self.rank, self.l_derivs)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "ainvs": list(self.ainvs),
            "conductor": self.conductor,
            "root_number": self.root_number,
            "rank": self.rank,
            "l_derivs": list(self.l_derivs),
            "zeros": list(self.zeros),
        }


def _validate_record(obj: dict, line: Optional[int]) -> CurveRecord:
    for name, typ in _FIELDS.items():
        if name not in obj:
            raise ParseError(f"missing field", field=name, line=line)
        if typ in (int,) and not isinstance(obj[name], int):
            raise ParseError(f"expected integer", field=name, line=line)
        if typ is str and not isinstance(obj[name], str):
            raise ParseError(f"expected string", field=name, line=line)
        if typ is list and not isinstance(obj[name], list):
            raise ParseError(f"expected array", field=name, line=line)
    ainvs = obj["ainvs"]
    if len(ainvs) != 5 or not all(isinstance(v, int) for v in ainvs):
        raise ParseError(f"expected exactly 5 integers, got {len(ainvs)}",
                         field="ainvs", line=line)
    label = obj["label"]
    rank = obj["rank"]
    if rank < 0:
        raise ValidationError(f"{label}: rank must be >= 0, got {rank}")
    zeros = [float(z) for z in obj["zeros"]]
    for i in range(1, len(zeros)):
        if zeros[i] < zeros[i - 1] or (zeros[i] == zeros[i - 1] and zeros[i] != 0.0):
            raise ValidationError(f"{label}: zeros out of order at index {i}")
    if any(z < 0 for z in zeros):
        raise ValidationError(f"{label}: negative zero ordinate")
    leading = 0
    for z in zeros:
        if z == 0.0:
            leading += 1
        else:
            break
    if zeros and leading != rank:
        raise ValidationError(
            f"{label}: {leading} leading zero ordinates but rank {rank}"
        )
    l_derivs = [float(v) for v in obj["l_derivs"]]
    if len(l_derivs) <= rank:
        raise ValidationError(f"{label}: l_derivs must extend past index rank={rank}")
    flags = []
    for k in range(rank):
        if abs(l_derivs[k]) >= 1e-6:
            raise ValidationError(
                f"{label}: |l_derivs[{k}]| = {abs(l_derivs[k]):.2e} but rank is {rank}"
            )
    if obj["root_number"] not in (1, -1):
        raise ValidationError(f"{label}: root_number must be +1 or -1")
    if obj["root_number"] != (-1) ** rank:
        flags.append(f"root_number {obj['root_number']} inconsistent with rank {rank}")
    record = CurveRecord(
        label=label,
        ainvs=tuple(int(v) for v in ainvs),
        conductor=obj["conductor"],
        root_number=obj["root_number"],
        rank=rank,
        l_derivs=tuple(l_derivs),
        zeros=tuple(zeros),
        flags=tuple(flags),
    )
    record.to_model()  # surfaces singular-curve / conductor violations now
    return record


def load_dataset(path: str | os.PathLike) -> list[CurveRecord]:
    """Parse and validate a fixture file (JSON array or JSON lines)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"dataset file not found: {path}")
    text = path.read_text(encoding="utf-8")
    records: list[CurveRecord] = []
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
        if not isinstance(raw, list):
            raise ParseError("top-level JSON value must be an array")
        for i, obj in enumerate(raw):
            if not isinstance(obj, dict):
                raise ParseError("array elements must be objects", line=i + 1)
            records.append(_validate_record(obj, line=None))
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            records.append(_validate_record(obj, line=lineno))
    seen: set[str] = set()
    for rec in records:
        if rec.label in seen:
            raise ValidationError(f"duplicate label {rec.label!r}")
        seen.add(rec.label)
    return records


def default_dataset_path(explicit: Optional[str] = None) -> Path:
    """--data flag, then EULERLAB_DATA, then the bundled fixture file."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(ENV_DATA)
    if env:
        return Path(env)
    return _BUNDLED


def find_record(records: Sequence[CurveRecord], label: str) -> CurveRecord:
    for rec in records:
        if rec.label == label:
            return rec
    known = ", ".join(r.label for r in records)
    raise InputError(f"curve {label!r} not in dataset (have: {known})")


# ----------------------------------------------------------------------
# writers: full-precision CSV plus a JSON summary, byte-deterministic
# ----------------------------------------------------------------------

def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json(path: str | os.PathLike, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=format_value) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def write_ap_table_csv(path: str | os.PathLike, table: ApTable) -> None:
    """CSV schema: p,kind,ap,np ascending in p."""
    write_csv(path, ["p", "kind", "ap", "np"],
              ((rd.p, rd.kind, rd.ap, rd.np) for rd in table))


def read_ap_table_csv(path: str | os.PathLike, model: CurveModel,
                      x_max: int | None = None) -> ApTable:
    """Ingest a previously written table (the bypass for large sweeps).

    The CSV does not record the sweep limit, so coverage defaults to the
    last listed prime; pass x_max to restore the original limit.
    """
    import numpy as np

    from .curves import _CODE_BY_KIND  # shared kind encoding

    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "p,kind,ap,np":
        raise ParseError("not an ap-table CSV (bad header)", line=1)
    ps, kinds, aps, npts = [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError("expected 4 columns", line=lineno)
        try:
            ps.append(int(parts[0]))
            kinds.append(_CODE_BY_KIND[parts[1]])
            aps.append(int(parts[2]))
            npts.append(int(parts[3]))
        except (ValueError, KeyError) as exc:
            raise ParseError(f"bad value: {exc}", line=lineno) from exc
    primes = np.array(ps, dtype=np.int64)
    if np.any(np.diff(primes) <= 0):
        raise ValidationError("table primes not strictly ascending")
    if x_max is None:
        x_max = int(primes[-1]) if len(primes) else 2
    elif len(primes) and x_max < primes[-1]:
        raise ValidationError(f"x_max {x_max} below the last listed prime {primes[-1]}")
    return ApTable(model, int(x_max), primes,
                   np.array(kinds, dtype=np.int8),
                   np.array(aps, dtype=np.int64),
                   np.array(npts, dtype=np.int64))


def write_zero_json(path: str | os.PathLike, record: CurveRecord,
                    zeros: ZeroList, values: LSpecialValues) -> None:
    """Serialise computed zeros/values in the fixture schema for cross-checks."""
    payload = {
        "label": record.label,
        "ainvs": list(record.ainvs),
        "conductor": record.conductor,
        "root_number": record.root_number,
        "rank": values.r,
        "l_derivs": list(values.derivs),
        "zeros": zeros.flat(),
    }
    write_json(path, payload)
