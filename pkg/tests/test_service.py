"""HTTP layer: endpoints mirror the handler contracts 1:1."""

import math

import pytest
import yaml
from fastapi.testclient import TestClient

from auditgame.service.app import app

from conftest import CONFIG_DIR

client = TestClient(app)


def body(name):
    with open(CONFIG_DIR / f"{name}.yaml") as fh:
        return yaml.safe_load(fh)


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_solve_auditor_frozen_confidence():
    resp = client.post("/solve-auditor", json=body("lambda-sweep"))
    assert resp.status_code == 200
    payload = resp.json()
    low = next(r for r in payload["confidence"] if r["signal"] == "low")
    assert low["r_g"] == pytest.approx(1.0 / (1.0 + math.exp(-0.5)), abs=1e-12)
    # Bare DP-game config: no general-utility instrument, so no info strategy.
    assert payload["info_strategy"] is None


def test_solve_auditor_general_path_reports_info_strategy():
    resp = client.post("/solve-auditor", json=body("general-utility"))
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["info_strategy"] is not None
    for row in payload["info_strategy"]:
        assert row["action"] in ("clear", "flag")
        assert 0.0 <= row["posterior_g"] <= 1.0
    assert payload["info_value"] is not None


def test_unknown_field_is_422_with_location():
    bad = body("default")
    bad["auditor"]["typo"] = 1
    resp = client.post("/equilibrium", json=bad)
    assert resp.status_code == 422
    locs = [e["loc"] for e in resp.json()["detail"]]
    assert any(loc[-1] == "typo" for loc in locs)


def test_oracle_check_rejects_wide_signal_spaces():
    resp = client.post("/oracle-check", json=body("default"))
    assert resp.status_code == 400
    assert "2 signal bins" in resp.json()["detail"]


def test_equilibrium_response_is_internally_consistent():
    resp = client.post("/equilibrium", json=body("default"))
    assert resp.status_code == 200
    eq = resp.json()
    assert eq["epsilon"] in body("default")["budgets"]["grid"]
    assert sum(eq["weights"]) == pytest.approx(1.0, abs=1e-12)
    chosen = [c for c in eq["candidates"] if c["chosen"]]
    assert len(chosen) == 1
    assert chosen[0]["total"] == pytest.approx(eq["developer_total"], abs=1e-12)


def test_verify_dp_passes_and_ends_with_zero_shift_row():
    resp = client.post("/verify-dp", json=body("default"))
    assert resp.status_code == 200
    report = resp.json()
    assert report["passed"] is True
    assert all(row["satisfied"] for row in report["rows"])
    assert report["rows"][-1]["shift"] == 0.0
    assert report["rows"][-1]["max_log_ratio"] == 0.0


def test_sweep_rows_match_grid():
    resp = client.post("/sweep", json=body("ratio-sweep"))
    assert resp.status_code == 200
    sweep = resp.json()
    assert sweep["parameter"] == "qratio"
    assert len(sweep["rows"]) == 19
    assert sweep["columns"][0] == "ratio"
