import datetime as dt

import numpy as np
import pytest

from cinglear import baselines
from cinglear.dataset import PanelDataset
from cinglear.errors import (
    InsufficientHistory,
    LengthMismatch,
    MissingExogenous,
    TooShort,
)


def _panel(n_days=20, h=4, seed=0, names=("load", "solar", "gas_gen", "fuel_price")):
    rng = np.random.default_rng(seed)
    return PanelDataset(
        start_date=dt.date(2022, 1, 3),
        hours_per_day=h,
        prices=rng.normal(size=(n_days, h)),
        exogenous={n: rng.normal(size=(n_days, h)) for n in names},
        day_of_week=(np.arange(n_days) % 7) + 1,
    )


def test_naive_forecast_is_flat_last_hour():
    panel = _panel()
    fc = baselines.naive_forecast(panel, 5)
    assert np.array_equal(fc, np.full(4, panel.prices[4, -1]))
    with pytest.raises(InsufficientHistory):
        baselines.naive_forecast(panel, 0)


def test_seasonal_naive_repeats_profile():
    panel = _panel()
    assert np.array_equal(baselines.seasonal_naive_forecast(panel, 7), panel.prices[6])


def test_fuel_persistence():
    panel = _panel()
    fc = baselines.fuel_persistence_forecast(panel, 3)
    assert np.array_equal(fc, np.full(4, panel.exogenous["fuel_price"][2, -1]))
    with pytest.raises(MissingExogenous):
        baselines.fuel_persistence_forecast(panel, 3, series="coal")


def test_ensemble_mean():
    assert np.array_equal(baselines.ensemble_mean([1.0, 3.0], [3.0, 5.0]), [2.0, 4.0])
    with pytest.raises(LengthMismatch):
        baselines.ensemble_mean([1.0], [1.0, 2.0])


def test_ar1_coefficient_recovered():
    rng = np.random.default_rng(1)
    y = np.zeros(2000)
    for t in range(1, 2000):
        y[t] = 0.7 * y[t - 1] + rng.normal()
    model = baselines.fit_arima(y, 1, 0)
    assert 0.6 <= model.ar[0] <= 0.8
    assert abs(model.intercept) < 0.2


def test_white_noise_yields_small_coefficients():
    y = np.random.default_rng(2).normal(size=2000)
    model = baselines.fit_arima(y, 1, 1)
    assert abs(model.ar[0]) <= 0.15 or abs(model.ar[0] + model.ma[0]) <= 0.15


def test_zero_order_model_is_the_mean():
    y = np.random.default_rng(3).normal(5.0, 1.0, size=200)
    model = baselines.fit_arima(y, 0, 0)
    assert np.isclose(model.intercept, y.mean())
    fc = baselines.forecast_arimax(model, 3)
    assert np.allclose(fc, y.mean())


def test_exogenous_coefficient_recovered():
    rng = np.random.default_rng(4)
    x = rng.normal(size=500)
    y = 2.0 + 3.0 * x + 0.1 * rng.normal(size=500)
    model = baselines.fit_arima(y, 0, 0, exog=x[:, None])
    assert abs(model.exog_coef[0] - 3.0) < 0.05
    assert abs(model.intercept - 2.0) < 0.05


def test_ar1_forecast_recursion():
    y = np.random.default_rng(5).normal(size=300)
    model = baselines.fit_arima(y, 1, 0)
    fc = baselines.forecast_arimax(model, 2)
    f1 = model.intercept + model.ar[0] * y[-1]
    f2 = model.intercept + model.ar[0] * f1
    assert np.allclose(fc, [f1, f2], atol=1e-12)


def test_too_short_series():
    with pytest.raises(TooShort):
        baselines.fit_arima(np.ones(15), 1, 1)


def test_exogenous_forecast_validation():
    y = np.random.default_rng(6).normal(size=200)
    x = np.random.default_rng(7).normal(size=(200, 2))
    model = baselines.fit_arima(y, 1, 0, exog=x)
    with pytest.raises(MissingExogenous):
        baselines.forecast_arimax(model, 4)
    with pytest.raises(MissingExogenous):
        baselines.forecast_arimax(model, 4, exog_future=np.ones((4, 3)))
    fc = baselines.forecast_arimax(model, 4, exog_future=np.zeros((4, 2)))
    assert fc.shape == (4,)


def test_exog_length_mismatch():
    with pytest.raises(LengthMismatch):
        baselines.fit_arima(np.ones(100), 0, 0, exog=np.ones((50, 1)))


def test_gas_generation_forecast_runs():
    panel = _panel(n_days=30, h=6, seed=8)
    fc = baselines.forecast_gas_generation(panel, 25, train_days=14)
    assert fc.shape == (6,)
    assert np.all(np.isfinite(fc))
    with pytest.raises(InsufficientHistory):
        baselines.forecast_gas_generation(panel, 10)
