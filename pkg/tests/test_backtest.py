import numpy as np
import pytest

from cinglear import backtest as bt
from cinglear import baselines
from cinglear.errors import InsufficientData, ShapeMismatch


def _cfg(**kwargs):
    base = dict(train_days=40, test_days=2, n_lambda=20, models=("snaive", "cing"),
                n_samples=2000, seed=0)
    base.update(kwargs)
    return bt.BacktestConfig(**base)


def test_config_validation():
    with pytest.raises(InsufficientData):
        bt.BacktestConfig(train_days=3, test_days=1, cv_folds=5)
    with pytest.raises(InsufficientData):
        bt.BacktestConfig(train_days=40, test_days=0)
    with pytest.raises(InsufficientData):
        bt.BacktestConfig(train_days=40, test_days=1, models=("cing", "sarimax"))


def test_point_metrics_hand():
    mae, rmse = bt.point_metrics([[1.0, 2.0]], [[0.0, 0.0]])
    assert mae == 1.5
    assert rmse == pytest.approx(np.sqrt(2.5))
    assert rmse >= mae
    with pytest.raises(ShapeMismatch):
        bt.point_metrics(np.ones((2, 2)), np.ones((3, 2)))


def test_day_seeds_distinct():
    seeds = {bt._day_seed(0, d, m) for d in range(50) for m in bt.KNOWN_MODELS}
    assert len(seeds) == 50 * len(bt.KNOWN_MODELS)


def test_process_day_baseline_outputs(small_panel):
    panel, _, _ = small_panel
    cfg = _cfg(models=("naive", "snaive"))
    r = bt.process_day(panel, 50, cfg)
    assert not r.failures
    assert np.array_equal(r.outputs["naive"].forecast, baselines.naive_forecast(panel, 50))
    assert np.array_equal(r.outputs["snaive"].forecast,
                          baselines.seasonal_naive_forecast(panel, 50))
    # degenerate distributions: CRPS reduces to absolute error
    out = r.outputs["snaive"]
    assert np.allclose(out.crps_per_hour, np.abs(out.forecast - r.actual))
    assert np.array_equal(out.lower, out.forecast)


def test_process_day_respects_causality(small_panel):
    panel, _, _ = small_panel
    cfg = _cfg()
    t = 50
    r1 = bt.process_day(panel, t, cfg)
    mutated = panel.prices.copy()
    mutated[t + 1:] += 500.0
    clone = type(panel)(panel.start_date, panel.hours_per_day, mutated,
                        dict(panel.exogenous), panel.day_of_week)
    r2 = bt.process_day(clone, t, cfg)
    for m in cfg.models:
        assert np.array_equal(r1.outputs[m].forecast, r2.outputs[m].forecast)
        assert np.array_equal(r1.outputs[m].crps_per_hour, r2.outputs[m].crps_per_hour)


def test_process_day_records_failures_instead_of_raising(small_panel):
    panel, _, _ = small_panel
    # an 8-day window is far too short for the hourly ARMA regression
    cfg = bt.BacktestConfig(train_days=8, test_days=1, cv_folds=5,
                            models=("arima", "snaive"), arima_p=6, arima_q=6)
    r = bt.process_day(panel, 15, cfg)
    assert "arima" in r.failures
    assert "snaive" in r.outputs


def test_sliding_window_single_day(small_panel):
    panel, _, _ = small_panel
    report = bt.run_sliding_window(panel, _cfg(test_days=1))
    assert report.days == [panel.n_days - 1]
    assert report.failure_rate == 0.0
    assert set(report.metrics) == {"snaive", "cing"}


def test_metrics_recomputable_from_report(small_panel):
    panel, _, _ = small_panel
    report = bt.run_sliding_window(panel, _cfg(test_days=3))
    for model in ("snaive", "cing"):
        mae, rmse = bt.point_metrics(report.forecasts(model), report.actuals())
        assert abs(mae - report.metrics[model]["mae"]) < 1e-12
        assert abs(rmse - report.metrics[model]["rmse"]) < 1e-12
        assert rmse >= mae
        assert report.metrics[model]["n_days"] == 3


def test_backtest_is_reproducible(small_panel):
    panel, _, _ = small_panel
    r1 = bt.run_sliding_window(panel, _cfg(test_days=2))
    r2 = bt.run_sliding_window(panel, _cfg(test_days=2))
    for a, b in zip(r1.results, r2.results):
        for m in a.outputs:
            assert np.array_equal(a.outputs[m].forecast, b.outputs[m].forecast)
            assert np.array_equal(a.outputs[m].crps_per_hour, b.outputs[m].crps_per_hour)
    assert r1.metrics == r2.metrics


def test_parallel_matches_sequential(small_panel):
    panel, _, _ = small_panel
    seq = bt.run_sliding_window(panel, _cfg(test_days=3, jobs=1))
    par = bt.run_sliding_window(panel, _cfg(test_days=3, jobs=3))
    assert seq.metrics == par.metrics


def test_refresh_lambda_reuses_selection(small_panel):
    panel, _, _ = small_panel
    report = bt.run_sliding_window(panel, _cfg(test_days=4, refresh_lambda=2))
    lams = [r.lambda_opt for r in report.results]
    assert lams[1] == lams[0]
    assert lams[3] == lams[2]


def test_coefficient_history_collected(small_panel):
    panel, _, _ = small_panel
    report = bt.run_sliding_window(panel, _cfg(test_days=2))
    hist = report.coefficient_history()
    assert len(hist) == 2
    assert hist[0].shape == hist[1].shape


def test_window_too_short_rejected(small_panel):
    panel, _, _ = small_panel
    with pytest.raises(InsufficientData):
        bt.run_sliding_window(panel, _cfg(test_days=panel.n_days - 7))


def test_no_transform_mode(small_panel):
    panel, _, _ = small_panel
    report = bt.run_sliding_window(panel, _cfg(test_days=1, use_transform=False))
    assert report.failure_rate == 0.0
    dist = report.results[0].outputs["cing"].distribution
    assert dist.scaler is None


def test_arima_models_run_in_backtest(small_panel):
    panel, _, _ = small_panel
    report = bt.run_sliding_window(panel, _cfg(test_days=1, models=("arima", "arimax")))
    assert report.failure_rate == 0.0
    fc_a = report.results[0].outputs["arima"].forecast
    fc_x = report.results[0].outputs["arimax"].forecast
    assert np.all(np.isfinite(fc_a)) and np.all(np.isfinite(fc_x))
    assert not np.array_equal(fc_a, fc_x)
