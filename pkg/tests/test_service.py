import pytest
from fastapi.testclient import TestClient

from cinglear.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app, raise_server_exceptions=False)


@pytest.fixture(scope="module")
def synth_dir(client, tmp_path_factory):
    d = tmp_path_factory.mktemp("svc")
    resp = client.post("/synth", json={
        "out_dir": str(d), "days": 45, "hours": 4, "exog": 2,
        "support": 3, "noise": 0.5, "seed": 7,
    })
    assert resp.status_code == 200
    return d, resp.json()


def test_health_and_version(client):
    assert client.get("/health").json() == {"status": "ok"}
    v = client.get("/version").json()
    assert v["name"] == "cinglear"
    assert v["version"]


def test_synth_reports_support(synth_dir):
    d, out = synth_dir
    assert out["n_days"] == 45
    assert len(out["support"]) == 3
    assert (d / "synth.csv").exists()
    assert (d / "truth_coefficients.csv").exists()


def test_fit_endpoint(client, synth_dir, tmp_path):
    d, _ = synth_dir
    resp = client.post("/fit", json={
        "data": str(d / "synth.csv"), "out_dir": str(tmp_path),
        "train_days": 30, "solver": {"n_lambda": 15},
    })
    assert resp.status_code == 200
    out = resp.json()
    assert out["n_active_groups"] <= out["n_groups"]
    assert out["lambda"] > 0
    assert (tmp_path / "coefficients.csv").exists()
    assert (tmp_path / "layout.txt").exists()


def test_backtest_endpoint(client, synth_dir, tmp_path):
    d, _ = synth_dir
    resp = client.post("/backtest", json={
        "data": str(d / "synth.csv"), "out_dir": str(tmp_path),
        "train_days": 30, "test_days": 2, "models": ["snaive", "cing"],
        "n_samples": 500, "solver": {"n_lambda": 10},
    })
    assert resp.status_code == 200
    out = resp.json()
    assert out["n_test_days"] == 2
    assert out["failure_rate"] == 0.0
    assert set(out["metrics"]) == {"snaive", "cing"}
    assert out["metrics"]["cing"]["rmse"] >= 0


def test_forecast_endpoint(client, synth_dir, tmp_path):
    d, _ = synth_dir
    resp = client.post("/forecast", json={
        "data": str(d / "synth.csv"), "out_dir": str(tmp_path),
        "train_days": 30, "models": ["snaive"],
    })
    assert resp.status_code == 200
    assert resp.json()["failures"] == {}
    assert (tmp_path / "forecast.csv").exists()


def test_diagnose_endpoint(client, synth_dir, tmp_path):
    d, _ = synth_dir
    bt_dir = tmp_path / "bt"
    client.post("/backtest", json={
        "data": str(d / "synth.csv"), "out_dir": str(bt_dir),
        "train_days": 30, "test_days": 3, "models": ["cing"],
        "n_samples": 500, "solver": {"n_lambda": 10},
    })
    resp = client.post("/diagnose", json={
        "coeffs_dir": str(bt_dir / "coefficients"), "data": str(d / "synth.csv"),
        "out_dir": str(tmp_path / "diag"), "train_days": 30, "s_max": 4,
    })
    assert resp.status_code == 200
    out = resp.json()
    assert out["n_matrices"] == 3
    assert (tmp_path / "diag" / "theta.csv").exists()
    assert (tmp_path / "diag" / "corr.csv").exists()


def test_data_error_maps_to_400(client, tmp_path):
    resp = client.post("/fit", json={
        "data": str(tmp_path / "missing.csv"), "out_dir": str(tmp_path),
        "train_days": 30,
    })
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "data"


def test_numerical_error_maps_to_500(client, synth_dir, tmp_path):
    d, _ = synth_dir
    # 7 days x 4 hours is too short for the hourly ARMA: every test day
    # fails and the run exceeds the failure budget
    resp = client.post("/backtest", json={
        "data": str(d / "synth.csv"), "out_dir": str(tmp_path),
        "train_days": 7, "test_days": 2, "models": ["arima"],
        "solver": {"cv_folds": 2},
    })
    assert resp.status_code == 500
    assert resp.json()["detail"]["kind"] == "numerical"


def test_invalid_request_is_422(client):
    resp = client.post("/synth", json={"out_dir": "/tmp/x", "days": 0})
    assert resp.status_code == 422
