"""Oracle package tests: registry, traces, determinism, cross-validation.

The full desk-fixture regeneration (about 20 minutes) is gated behind
ORACLE_FULL=1; the default suite exercises the same pipeline on a reduced
request and checks byte-level determinism.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest
from mpmath import workdps

from eulerlab_oracle.curves import (
    OracleError,
    dirichlet_coefficients,
    resolve_curve,
    trace_of_frobenius,
)
from eulerlab_oracle.generate import OracleRequest, generate_fixtures
from eulerlab_oracle.lseries import (
    LSeries,
    analytic_rank,
    coefficient_count,
    derivatives_at_center,
    derive_root_number,
)
from eulerlab_oracle.validate import cross_validate

REPO_ROOT = Path(__file__).resolve().parents[2]
COMMITTED_FIXTURE = REPO_ROOT / "src" / "eulerlab" / "data" / "curves.json"
DESK_REQUEST = REPO_ROOT / "oracle" / "requests" / "desk.json"


# ----------------------------------------------------------------------
# curve arithmetic
# ----------------------------------------------------------------------

def test_registry_labels():
    for label, cond in (("11a1", 11), ("37a1", 37), ("389a1", 389), ("5077a1", 5077)):
        c = resolve_curve(label)
        assert c.conductor == cond
        assert c.label == label


def test_resolve_raw_spec():
    c = resolve_curve({"label": "x37", "ainvs": [0, 0, 1, -1, 0], "conductor": 37})
    assert c.ainvs == (0, 0, 1, -1, 0)
    with pytest.raises(OracleError):
        resolve_curve("99z9")
    with pytest.raises(OracleError):
        resolve_curve({"ainvs": [1, 2, 3]})


def test_traces_by_hand():
    c37 = resolve_curve("37a1")
    assert trace_of_frobenius(c37, 2) == -2
    assert trace_of_frobenius(c37, 3) == -3
    assert trace_of_frobenius(c37, 37) == -1  # nonsplit multiplicative
    c11 = resolve_curve("11a1")
    assert trace_of_frobenius(c11, 2) == -2
    assert trace_of_frobenius(c11, 11) == 1   # split multiplicative


def test_coefficients_multiplicative():
    c = resolve_curve("11a1")
    a = dirichlet_coefficients(c, 200)
    assert a[1] == 1
    assert a[6] == a[2] * a[3]
    assert a[4] == a[2] * a[2] - 2
    assert a[121] == a[11] * a[11]


# ----------------------------------------------------------------------
# series values
# ----------------------------------------------------------------------

def test_root_numbers_and_ranks_small():
    for label, want_w, want_r in (("11a1", 1, 0), ("37a1", -1, 1)):
        c = resolve_curve(label)
        coeffs = dirichlet_coefficients(c, coefficient_count(c.conductor, 40))
        w = derive_root_number(c, coeffs)
        assert w == want_w, label
        ser = LSeries(c, w, coeffs)
        with workdps(35):
            derivs = derivatives_at_center(ser, 3)
            assert analytic_rank(derivs) == want_r, label


def test_l_value_11a1_reference():
    c = resolve_curve("11a1")
    coeffs = dirichlet_coefficients(c, coefficient_count(11, 40))
    ser = LSeries(c, 1, coeffs)
    with workdps(35):
        l1 = ser.l_value(1)
        assert abs(l1.real - 0.2538418608559107) < 1e-14


def test_request_validation(tmp_path):
    with pytest.raises(OracleError):
        OracleRequest(curves=("11a1",), precision=20)
    with pytest.raises(OracleError):
        OracleRequest(curves=("11a1",), t_max=60.0)
    p = tmp_path / "req.json"
    p.write_text(json.dumps({"curves": ["11a1"], "t_max": 4.0, "precision": 30}))
    req = OracleRequest.from_json(p)
    assert req.curves == ("11a1",)


# ----------------------------------------------------------------------
# generation
# ----------------------------------------------------------------------

def _small_request():
    return OracleRequest(curves=("11a1", "37a1"), t_max=6.0, precision=30)


def test_generate_small_and_deterministic(tmp_path):
    a = generate_fixtures(_small_request(), tmp_path / "a.json")
    b = generate_fixtures(_small_request(), tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()
    records = json.loads(a.read_text())
    assert [r["label"] for r in records] == ["11a1", "37a1"]
    assert records[0]["rank"] == 0 and records[0]["root_number"] == 1
    assert records[1]["rank"] == 1 and records[1]["zeros"][0] == 0.0
    # 37a1 has one positive zero below 6 (5.0032...)
    assert len([z for z in records[1]["zeros"] if z > 0]) == 1
    assert abs(records[1]["zeros"][1] - 5.003170014006659) < 1e-9


def test_generate_empty_request(tmp_path):
    out = generate_fixtures(OracleRequest(curves=(), t_max=5.0, precision=30),
                            tmp_path / "empty.json")
    assert json.loads(out.read_text()) == []


def test_generate_s_grid_side_file(tmp_path):
    req = OracleRequest(curves=("11a1",), t_max=2.0, precision=30, s_grid=(1.25, 2.0))
    out = generate_fixtures(req, tmp_path / "fx.json")
    side = json.loads((tmp_path / "fx_lgrid.json").read_text())
    assert abs(side["11a1"][0]["L"] - 0.3311885726703956) < 1e-12


def test_committed_fixture_consistent_with_request():
    committed = json.loads(COMMITTED_FIXTURE.read_text())
    request = json.loads(DESK_REQUEST.read_text())
    assert [r["label"] for r in committed] == request["curves"]
    for rec in committed:
        assert rec["root_number"] == (-1) ** rec["rank"]
        positive = [z for z in rec["zeros"] if z > 0]
        assert positive == sorted(positive)
        assert all(z <= request["t_max"] for z in positive)


@pytest.mark.skipif(os.environ.get("ORACLE_FULL") != "1",
                    reason="full regeneration takes ~20 minutes; set ORACLE_FULL=1")
def test_full_fixture_regenerates_byte_identically(tmp_path):
    req = OracleRequest.from_json(DESK_REQUEST)
    out = generate_fixtures(req, tmp_path / "regen.json")
    assert out.read_bytes() == COMMITTED_FIXTURE.read_bytes()


# ----------------------------------------------------------------------
# cross-validation
# ----------------------------------------------------------------------

def test_cross_validate_identical(tmp_path):
    report = cross_validate(COMMITTED_FIXTURE, COMMITTED_FIXTURE, tol=0.0)
    assert report["pass"] is True
    assert set(report["curves"]) == {"11a1", "37a1", "389a1", "5077a1"}


def test_cross_validate_perturbed_names_quantity(tmp_path):
    records = json.loads(COMMITTED_FIXTURE.read_text())
    records[0]["zeros"][-1] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(records))
    report = cross_validate(COMMITTED_FIXTURE, bad, tol=1e-6)
    assert report["pass"] is False
    entry = report["curves"]["11a1"]
    assert "zeros" in entry["failing"]
    assert entry["zeros"]["max_abs_diff"] == pytest.approx(1e-3, rel=1e-6)


def test_cross_validate_mismatched_labels(tmp_path):
    other = tmp_path / "other.json"
    other.write_text(json.dumps([{"label": "nope"}]))
    with pytest.raises(OracleError):
        cross_validate(COMMITTED_FIXTURE, other, tol=1e-6)


def test_cli_generate_and_validate(tmp_path):
    req = tmp_path / "req.json"
    req.write_text(json.dumps({"curves": ["11a1"], "t_max": 2.0, "precision": 30}))
    out = tmp_path / "fx.json"
    r = subprocess.run([sys.executable, "-m", "eulerlab_oracle.cli", "generate",
                        str(req), "--out", str(out)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert out.exists()
    r = subprocess.run([sys.executable, "-m", "eulerlab_oracle.cli", "cross-validate",
                        str(out), str(out), "--tol", "0"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["pass"] is True
