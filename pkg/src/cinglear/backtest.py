"""Sliding-window backtest: daily refit, CV-selected regularization, forecasts,
probabilistic scoring, and point metrics.

Each test day is forecast from a window of the preceding days (expanding until
the configured length is reached, then sliding). The window is fully refit:
scalers, design standardization, lambda selection, coefficients. Test days are
independent computations and may run concurrently.
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from . import baselines, probabilistic, solver
from .dataset import PanelDataset
from .errors import (
    CingLearError,
    InsufficientData,
    MissingDistribution,
    ShapeMismatch,
)
from .features import MIN_HISTORY, build_design, build_feature_vector
from .preprocess import fit_scaler, transform
from .probabilistic import PredictiveDistribution

KNOWN_MODELS = ("naive", "snaive", "arima", "arimax", "lear", "cing")
FAILURE_BUDGET = 0.05


@dataclass(frozen=True)
class BacktestConfig:
    train_days: int
    test_days: int
    cv_folds: int = 5
    n_lambda: int = solver.DEFAULT_N_LAMBDA
    lambda_ratio: float = solver.DEFAULT_LAMBDA_RATIO
    max_iter: int = solver.DEFAULT_MAX_ITER
    tol: float = solver.DEFAULT_TOL
    kkt_tol: float = solver.DEFAULT_KKT_TOL
    models: tuple = ("snaive", "lear", "cing")
    seed: int = 0
    n_samples: int = probabilistic.DEFAULT_N_SAMPLES
    interval_alpha: float = 0.1
    use_transform: bool = True
    transform_exogenous: bool = True
    arima_p: int = 1
    arima_q: int = 1
    refresh_lambda: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.train_days < self.cv_folds:
            raise InsufficientData("train_days must be at least cv_folds")
        if self.test_days < 1:
            raise InsufficientData("test_days must be >= 1")
        unknown = set(self.models) - set(KNOWN_MODELS)
        if unknown:
            raise InsufficientData(f"unknown models: {sorted(unknown)}")


@dataclass
class ModelDayOutput:
    forecast: np.ndarray           # H, $/MWh
    lower: np.ndarray
    upper: np.ndarray
    crps_per_hour: np.ndarray
    distribution: PredictiveDistribution = field(repr=False, default=None)


@dataclass
class DayResult:
    day: int
    actual: np.ndarray
    outputs: dict                  # model -> ModelDayOutput
    failures: dict                 # model -> error message
    lambda_opt: float = None       # cing
    lear_lambdas: np.ndarray = None
    coefficients: solver.CoefficientMatrix = None  # cing


@dataclass
class BacktestReport:
    config: BacktestConfig
    days: list
    results: list                  # DayResult per day
    metrics: dict                  # model -> {"mae":, "rmse":, "crps":, "n_days":}
    failure_rate: float

    def forecasts(self, model):
        h = self.results[0].actual.shape[0]
        out = np.full((len(self.results), h), np.nan)
        for i, r in enumerate(self.results):
            if model in r.outputs:
                out[i] = r.outputs[model].forecast
        return out

    def actuals(self):
        return np.stack([r.actual for r in self.results])

    def coefficient_history(self):
        return [r.coefficients.b for r in self.results if r.coefficients is not None]


def point_metrics(forecasts, actuals):
    """(MAE, RMSE) over all day/hour cells."""
    f = np.asarray(forecasts, dtype=float)
    a = np.asarray(actuals, dtype=float)
    if f.shape != a.shape:
        raise ShapeMismatch(f"shapes {f.shape} and {a.shape} differ")
    err = f - a
    return float(np.abs(err).mean()), float(np.sqrt((err ** 2).mean()))


def crps_metric(distributions, actuals, n=probabilistic.DEFAULT_N_SAMPLES, seed=0):
    """Mean sample-based CRPS over all day/hour cells."""
    a = np.asarray(actuals, dtype=float)
    if len(distributions) != a.shape[0]:
        raise MissingDistribution("one distribution per scored day is required")
    total = 0.0
    count = 0
    for d, dist in enumerate(distributions):
        if dist is None:
            raise MissingDistribution(f"day {d} has no predictive distribution")
        draws = probabilistic.sample(dist, n=n, seed=seed + d)
        for h in range(a.shape[1]):
            total += probabilistic.crps_sample(draws[:, h], a[d, h])
            count += 1
    return total / count


def _day_seed(base_seed, day, model):
    return (base_seed * 1_000_003 + day * 101 + KNOWN_MODELS.index(model)) % (2 ** 31)


def _score_output(dist, actual, cfg, seed):
    """One sampling pass: point forecast, interval bounds, per-hour CRPS."""
    mean = dist.point_forecast()
    if np.trace(dist.covariance) == 0.0:
        crps = np.abs(mean - actual)
        return ModelDayOutput(mean, mean.copy(), mean.copy(), crps, dist)
    draws = probabilistic.sample(dist, n=cfg.n_samples, seed=seed)
    lower = np.quantile(draws, cfg.interval_alpha / 2, axis=0)
    upper = np.quantile(draws, 1 - cfg.interval_alpha / 2, axis=0)
    crps = np.array([
        probabilistic.crps_sample(draws[:, h], actual[h]) for h in range(mean.size)
    ])
    return ModelDayOutput(mean, lower, upper, crps, dist)


def _transformed_panel(panel, window, cfg):
    """Transform prices/exogenous with scalers fitted on the window only."""
    if not cfg.use_transform:
        return panel, None
    price_scaler = fit_scaler(panel.prices[window])
    prices = transform(price_scaler, panel.prices)
    exog = {}
    for name, arr in panel.exogenous.items():
        if cfg.transform_exogenous:
            s = fit_scaler(arr[window])
            exog[name] = transform(s, arr)
        else:
            exog[name] = arr
    t_panel = PanelDataset(
        start_date=panel.start_date,
        hours_per_day=panel.hours_per_day,
        prices=prices,
        exogenous=exog,
        day_of_week=panel.day_of_week,
    )
    return t_panel, price_scaler


def _fit_regularized(design, target, cfg, per_hour, lambda_override=None):
    """Fit either the joint group path (cing) or independent per-hour lassos (lear)."""
    x, p = design.x, target.p
    cv_kwargs = dict(
        n_folds=cfg.cv_folds, n_lambda=cfg.n_lambda, ratio=cfg.lambda_ratio,
        tol=cfg.tol, kkt_tol=cfg.kkt_tol, max_iter=cfg.max_iter,
    )
    fit_kwargs = dict(tol=cfg.tol, kkt_tol=cfg.kkt_tol, max_iter=cfg.max_iter)
    if per_hour:
        lams = np.empty(p.shape[1])
        b = np.empty((x.shape[1], p.shape[1]))
        for h in range(p.shape[1]):
            if lambda_override is not None:
                lams[h] = lambda_override[h]
            else:
                lams[h] = solver.cross_validate(x, p[:, h], **cv_kwargs).lambda_opt
            b[:, h], _ = solver.fit_lasso_per_hour(x, p[:, h], lams[h], **fit_kwargs)
        coefs = solver.CoefficientMatrix(b=b, intercepts=target.hour_means,
                                         layout=design.layout)
        return coefs, lams
    if lambda_override is not None:
        lam = float(lambda_override)
    else:
        lam = solver.cross_validate(x, p, **cv_kwargs).lambda_opt
    coefs, _ = solver.fit_group_lasso(x, p, lam, **fit_kwargs)
    coefs.intercepts = target.hour_means
    coefs.layout = design.layout
    return coefs, lam


def _linear_model_output(design, target, coefs, t_panel, t, scaler, actual, cfg, seed):
    row = design.standardize_row(build_feature_vector(t_panel, t))
    mean_t = coefs.predict(row)
    residuals = target.p - design.x @ coefs.b
    cov = probabilistic.estimate_covariance(residuals)
    dist = PredictiveDistribution(mean=mean_t, covariance=cov, scaler=scaler)
    return _score_output(dist, actual, cfg, seed)


def _degenerate_output(forecast, actual, cfg, seed):
    h = forecast.shape[0]
    dist = PredictiveDistribution(mean=forecast, covariance=np.zeros((h, h)), scaler=None)
    return _score_output(dist, actual, cfg, seed)


def _arima_output(panel, t_panel, scaler, window, t, cfg, with_exog, actual, seed):
    y = t_panel.prices[window].ravel()
    h = panel.hours_per_day
    exog = exog_future = None
    if with_exog:
        names = t_panel.exog_names
        cols = [t_panel.exogenous[k][window].ravel() for k in names]
        fut = [t_panel.exogenous[k][t] for k in names]
        for j in range(2, 8):  # day-of-week dummies, first level absorbed by intercept
            dow = (panel.day_of_week[window] == j).astype(float)
            cols.append(np.repeat(dow, h))
            fut.append(np.full(h, float(panel.day_of_week[t] == j)))
        exog = np.column_stack(cols)
        exog_future = np.column_stack(fut)
    model = baselines.fit_arima(y, cfg.arima_p, cfg.arima_q, exog=exog)
    fc_t = baselines.forecast_arimax(model, h, exog_future=exog_future)
    if scaler is not None:
        from .preprocess import inverse_transform
        fc = inverse_transform(scaler, fc_t)
    else:
        fc = fc_t
    return _degenerate_output(fc, actual, cfg, seed)


def process_day(panel, t, cfg, lambda_cache=None):
    """Fit every configured model on the window before day t and forecast day t."""
    window = np.arange(max(MIN_HISTORY, t - cfg.train_days), t)
    actual = panel.prices[t]
    t_panel, price_scaler = _transformed_panel(panel, window, cfg)
    result = DayResult(day=t, actual=actual.copy(), outputs={}, failures={})
    need_design = bool({"lear", "cing"} & set(cfg.models))
    design = target = None
    if need_design:
        design, target = build_design(t_panel, window)
    for model in cfg.models:
        seed = _day_seed(cfg.seed, t, model)
        try:
            if model == "naive":
                out = _degenerate_output(baselines.naive_forecast(panel, t), actual, cfg, seed)
            elif model == "snaive":
                out = _degenerate_output(
                    baselines.seasonal_naive_forecast(panel, t), actual, cfg, seed)
            elif model == "arima":
                out = _arima_output(panel, t_panel, price_scaler, window, t, cfg,
                                    False, actual, seed)
            elif model == "arimax":
                out = _arima_output(panel, t_panel, price_scaler, window, t, cfg,
                                    True, actual, seed)
            elif model == "lear":
                override = None if lambda_cache is None else lambda_cache.get("lear")
                coefs, lams = _fit_regularized(design, target, cfg, per_hour=True,
                                               lambda_override=override)
                result.lear_lambdas = np.asarray(lams)
                out = _linear_model_output(design, target, coefs, t_panel, t,
                                           price_scaler, actual, cfg, seed)
            elif model == "cing":
                override = None if lambda_cache is None else lambda_cache.get("cing")
                coefs, lam = _fit_regularized(design, target, cfg, per_hour=False,
                                              lambda_override=override)
                result.lambda_opt = float(lam)
                result.coefficients = coefs
                out = _linear_model_output(design, target, coefs, t_panel, t,
                                           price_scaler, actual, cfg, seed)
            result.outputs[model] = out
        except (CingLearError, np.linalg.LinAlgError) as exc:
            result.failures[model] = f"{type(exc).__name__}: {exc}"
    return result


def run_sliding_window(panel: PanelDataset, cfg: BacktestConfig) -> BacktestReport:
    first_test = panel.n_days - cfg.test_days
    if first_test - MIN_HISTORY < cfg.cv_folds:
        raise InsufficientData(
            f"panel of {panel.n_days} days cannot host {cfg.test_days} test days "
            f"plus lags and a {cfg.cv_folds}-fold training window"
        )
    test_days = list(range(first_test, panel.n_days))

    results = []
    if cfg.refresh_lambda > 1:
        # lambda reuse couples consecutive days, so run sequentially
        cache = {}
        for i, t in enumerate(test_days):
            use_cache = (i % cfg.refresh_lambda != 0) and cache
            r = process_day(panel, t, cfg, lambda_cache=cache if use_cache else None)
            if r.lambda_opt is not None:
                cache["cing"] = r.lambda_opt
            if r.lear_lambdas is not None:
                cache["lear"] = r.lear_lambdas
            results.append(r)
    elif cfg.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda t: process_day(panel, t, cfg), test_days))
    else:
        results = [process_day(panel, t, cfg) for t in test_days]

    metrics = {}
    n_cells = 0
    n_failed = 0
    for model in cfg.models:
        rows = [r for r in results if model in r.outputs]
        n_failed += len(results) - len(rows)
        n_cells += len(results)
        if not rows:
            metrics[model] = {"mae": float("nan"), "rmse": float("nan"),
                              "crps": float("nan"), "n_days": 0}
            continue
        f = np.stack([r.outputs[model].forecast for r in rows])
        a = np.stack([r.actual for r in rows])
        mae, rmse = point_metrics(f, a)
        crps = float(np.mean([r.outputs[model].crps_per_hour.mean() for r in rows]))
        metrics[model] = {"mae": mae, "rmse": rmse, "crps": crps, "n_days": len(rows)}
    failure_rate = n_failed / max(1, n_cells)
    return BacktestReport(config=cfg, days=test_days, results=results,
                          metrics=metrics, failure_rate=failure_rate)
