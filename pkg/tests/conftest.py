"""Shared fixtures: bundled curve records, reduction tables, coefficients.

The heavy 10^6 sweeps are session-scoped and shared by every test that
needs them; nothing here depends on the oracle package being installed.
"""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from eulerlab.config import DEFAULT
from eulerlab.curves import ap_table
from eulerlab.dataset import load_dataset
from eulerlab.lfunction import dirichlet_coeffs, required_n_max

FIXTURE_PATH = Path(__file__).parent.parent / "src" / "eulerlab" / "data" / "curves.json"

LABELS = ("11a1", "37a1", "389a1", "5077a1")


def _workers() -> int:
    return os.cpu_count() or 1


@pytest.fixture(scope="session")
def records():
    recs = {r.label: r for r in load_dataset(FIXTURE_PATH)}
    missing = [l for l in LABELS if l not in recs]
    if missing:
        pytest.fail(f"bundled fixture file lacks {missing}; regenerate with the oracle")
    return recs


@pytest.fixture(scope="session")
def models(records):
    return {label: rec.to_model() for label, rec in records.items()}


def _build_table(model, limit):
    """Rebuild, or round-trip through an explicit opt-in cache directory.

    EULERLAB_TEST_TABLE_CACHE speeds up local iteration on the heavy 10^6
    sweeps; the default (unset) always computes fresh tables.
    """
    cache_dir = os.environ.get("EULERLAB_TEST_TABLE_CACHE")
    if not cache_dir:
        return ap_table(model, limit, workers=_workers())
    from pathlib import Path

    from eulerlab.dataset import read_ap_table_csv, write_ap_table_csv

    path = Path(cache_dir) / f"{model.label}_{limit}.csv"
    if path.exists():
        return read_ap_table_csv(path, model, limit)
    table = ap_table(model, limit, workers=_workers())
    path.parent.mkdir(parents=True, exist_ok=True)
    write_ap_table_csv(path, table)
    return table


@pytest.fixture(scope="session")
def tables_1e5(models):
    return {label: _build_table(m, 10**5) for label, m in models.items()}


@pytest.fixture(scope="session")
def tables_1e6(models):
    return {label: _build_table(m, 10**6) for label, m in models.items()}


@pytest.fixture(scope="session")
def coeffs_afe(models, tables_1e5):
    """Dirichlet coefficients sufficient for the default expansion target."""
    out = {}
    for label, m in models.items():
        need = max(required_n_max(m, DEFAULT.afe_eps), 2)
        out[label] = dirichlet_coeffs(m, tables_1e5[label], need)
    return out
