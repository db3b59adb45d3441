"""Reference forecasters: naive persistence, seasonal naive, ARIMA, ARIMA-X.

ARIMA models are estimated by a two-stage Hannan-Rissanen procedure
(conditional least squares): a long autoregression supplies residual proxies,
then the value is regressed on its own lags, lagged residual proxies, and any
exogenous columns. Integration order is fixed at zero. The hourly recursion
treats the day boundary as continuous time.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import PanelDataset
from .errors import (
    InsufficientHistory,
    LengthMismatch,
    MissingExogenous,
    SingularRegression,
    TooShort,
)


def naive_forecast(panel: PanelDataset, d):
    """Every hour of day d gets the last observed hour of day d-1."""
    if d < 1 or d > panel.n_days:
        raise InsufficientHistory(f"day {d} has no previous day")
    return np.full(panel.hours_per_day, panel.prices[d - 1, -1])


def seasonal_naive_forecast(panel: PanelDataset, d):
    """Day d repeats the full hourly profile of day d-1."""
    if d < 1 or d > panel.n_days:
        raise InsufficientHistory(f"day {d} has no previous day")
    return panel.prices[d - 1].copy()


def fuel_persistence_forecast(panel: PanelDataset, d, series="fuel_price"):
    """Day-d fuel price forecast = last observed day-(d-1) value, flat across hours."""
    if d < 1 or d > panel.n_days:
        raise InsufficientHistory(f"day {d} has no previous day")
    if series not in panel.exogenous:
        raise MissingExogenous(f"panel has no series {series!r}")
    return np.full(panel.hours_per_day, panel.exogenous[series][d - 1, -1])


def ensemble_mean(f1, f2):
    """Element-wise mean of two forecasts."""
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    if f1.shape != f2.shape:
        raise LengthMismatch(f"shapes {f1.shape} and {f2.shape} differ")
    return 0.5 * (f1 + f2)


@dataclass
class ArimaModel:
    """Conditional-least-squares ARMA(p, q) with optional exogenous regressors."""

    intercept: float
    ar: np.ndarray
    ma: np.ndarray
    exog_coef: np.ndarray
    resid_var: float
    series: np.ndarray = field(repr=False, default=None)
    residuals: np.ndarray = field(repr=False, default=None)

    @property
    def p(self):
        return len(self.ar)

    @property
    def q(self):
        return len(self.ma)


def fit_arima(series, p, q, exog=None) -> ArimaModel:
    """Two-stage Hannan-Rissanen fit on an hourly series.

    exog, when given, is an (n, K') matrix aligned with the series.
    """
    y = np.asarray(series, dtype=float).ravel()
    n = y.size
    if n <= 10 * (p + q + 1):
        raise TooShort(f"{n} observations for ARMA({p},{q}); need > {10 * (p + q + 1)}")
    if exog is not None:
        exog = np.asarray(exog, dtype=float)
        if exog.shape[0] != n:
            raise LengthMismatch("exog rows must match the series length")

    # stage 1: long AR for residual proxies
    resid = np.zeros(n)
    if q > 0:
        long_order = max(10, 2 * (p + q))
        rows = np.column_stack(
            [np.ones(n - long_order)]
            + [y[long_order - i:n - i] for i in range(1, long_order + 1)]
        )
        coef, _, rank, _ = np.linalg.lstsq(rows, y[long_order:], rcond=None)
        if rank < rows.shape[1]:
            raise SingularRegression("long autoregression is rank-deficient")
        resid[long_order:] = y[long_order:] - rows @ coef
        t0 = long_order + q
    else:
        t0 = p

    # stage 2: value on p own lags, q lagged residual proxies, and exog
    cols = [np.ones(n - t0)]
    cols += [y[t0 - i:n - i] for i in range(1, p + 1)]
    cols += [resid[t0 - j:n - j] for j in range(1, q + 1)]
    n_exog = 0
    if exog is not None:
        n_exog = exog.shape[1]
        cols += [exog[t0:, k] for k in range(n_exog)]
    rows = np.column_stack(cols)
    coef, _, rank, _ = np.linalg.lstsq(rows, y[t0:], rcond=None)
    if rank < rows.shape[1]:
        raise SingularRegression("ARMA regression is rank-deficient")
    fitted = rows @ coef
    final_resid = np.zeros(n)
    final_resid[t0:] = y[t0:] - fitted
    return ArimaModel(
        intercept=float(coef[0]),
        ar=coef[1:1 + p].copy(),
        ma=coef[1 + p:1 + p + q].copy(),
        exog_coef=coef[1 + p + q:1 + p + q + n_exog].copy(),
        resid_var=float((final_resid[t0:] ** 2).mean()),
        series=y,
        residuals=final_resid,
    )


def forecast_arimax(model: ArimaModel, horizon, exog_future=None):
    """Iterated one-step recursion past the end of the training series.

    Future shocks are zero; known lags (values and residual proxies) are used
    where available. exog_future must be (horizon, K') when the model carries
    exogenous coefficients.
    """
    k = len(model.exog_coef)
    if k > 0:
        if exog_future is None:
            raise MissingExogenous("model has exogenous coefficients but no forecasts given")
        exog_future = np.asarray(exog_future, dtype=float)
        if exog_future.shape != (horizon, k):
            raise MissingExogenous(
                f"exog_future must have shape {(horizon, k)}, got {exog_future.shape}"
            )
    y = list(model.series)
    e = list(model.residuals)
    n = len(y)
    out = np.empty(horizon)
    for s in range(horizon):
        t = n + s
        val = model.intercept
        for i, phi in enumerate(model.ar, start=1):
            val += phi * y[t - i]
        for j, theta in enumerate(model.ma, start=1):
            val += theta * e[t - j]
        if k > 0:
            val += float(model.exog_coef @ exog_future[s])
        out[s] = val
        y.append(val)
        e.append(0.0)
    return out


def forecast_gas_generation(panel: PanelDataset, d, gas="gas_gen", load="load",
                            solar="solar", train_days=7, p=1, q=1):
    """Day-d natural gas generation forecast: ARMA(1,1) on the hourly series with
    the week-ago profile and the load/solar day-ahead forecasts as regressors."""
    if d < train_days + 7:
        raise InsufficientHistory(
            f"need {train_days} training days plus a week of lags before day {d}"
        )
    for name in (gas, load, solar):
        if name not in panel.exogenous:
            raise MissingExogenous(f"panel has no series {name!r}")
    h = panel.hours_per_day
    days = range(d - train_days, d)
    y = np.concatenate([panel.exogenous[gas][t] for t in days])
    exog = np.column_stack([
        np.concatenate([panel.exogenous[gas][t - 7] for t in days]),
        np.concatenate([panel.exogenous[load][t] for t in days]),
        np.concatenate([panel.exogenous[solar][t] for t in days]),
    ])
    model = fit_arima(y, p, q, exog=exog)
    exog_future = np.column_stack([
        panel.exogenous[gas][d - 7],
        panel.exogenous[load][d],
        panel.exogenous[solar][d],
    ])
    return forecast_arimax(model, h, exog_future=exog_future)
