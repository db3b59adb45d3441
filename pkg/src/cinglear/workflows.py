"""End-to-end workflows bound to files on disk.

These are the units of work behind the service endpoints and the CLI
subcommands: each reads CSV inputs, runs the in-memory pipeline, writes
deterministic artifacts, and returns a JSON-friendly summary.
"""
from __future__ import annotations

import datetime as dt
import os

import numpy as np

from . import diagnostics, reporting, solver
from .backtest import BacktestConfig, process_day, run_sliding_window
from .dataset import SyntheticSpec, generate_synthetic, load_series, write_series
from .errors import DataError, FailureBudgetExceeded, InsufficientData
from .features import MIN_HISTORY, build_design, make_layout
from .backtest import FAILURE_BUDGET


def synth_workflow(out_dir, days, hours=24, exog=4, support=5, noise=1.0,
                   coef_scale=1.0, seed=0):
    spec = SyntheticSpec(n_days=days, hours_per_day=hours, n_exog=exog,
                         support_size=support, noise_scale=noise,
                         coef_scale=coef_scale, seed=seed)
    panel, truth, support_idx = generate_synthetic(spec)
    os.makedirs(out_dir, exist_ok=True)
    data_path = os.path.join(out_dir, "synth.csv")
    truth_path = os.path.join(out_dir, "truth_coefficients.csv")
    write_series(panel, data_path)
    layout = make_layout(hours, panel.exog_names)
    reporting.write_coefficients_csv(
        solver.CoefficientMatrix(b=truth, layout=layout), truth_path)
    return {
        "data_path": data_path,
        "truth_path": truth_path,
        "n_days": days,
        "support": [int(j) for j in support_idx],
        "support_features": [layout.features[j].name for j in support_idx],
    }


def _training_window(panel, train_days, before_day=None):
    end = panel.n_days if before_day is None else before_day
    start = max(MIN_HISTORY, end - train_days)
    if end - start < 2:
        raise InsufficientData(f"window [{start}, {end}) is too short")
    return np.arange(start, end)


def fit_workflow(data_path, train_days, out_dir, model="cing", lam=None,
                 schema=None, fill=None, cfg_overrides=None):
    """Single fit on the trailing window; writes coefficients.csv + layout.txt."""
    panel = load_series(data_path, schema=schema, fill=fill)
    cfg = BacktestConfig(train_days=train_days, test_days=1,
                         models=(model,), **(cfg_overrides or {}))
    window = _training_window(panel, train_days)
    from .backtest import _fit_regularized, _transformed_panel
    t_panel, _ = _transformed_panel(panel, window, cfg)
    design, target = build_design(t_panel, window)
    if model == "lear":
        override = None if lam is None else np.full(panel.hours_per_day, float(lam))
        coefs, lams = _fit_regularized(design, target, cfg, per_hour=True,
                                       lambda_override=override)
        lam_out = [float(v) for v in lams]
    else:
        coefs, lam_out = _fit_regularized(design, target, cfg, per_hour=False,
                                          lambda_override=lam)
    os.makedirs(out_dir, exist_ok=True)
    coef_path = os.path.join(out_dir, "coefficients.csv")
    reporting.write_coefficients_csv(coefs, coef_path)
    layout_path = os.path.join(out_dir, "layout.txt")
    with open(layout_path, "w", newline="\n") as f:
        f.write(design.layout.manifest())
    active = diagnostics.support(coefs.b).indices
    return {
        "coefficients_path": coef_path,
        "layout_path": layout_path,
        "lambda": lam_out,
        "n_active_groups": len(active),
        "n_groups": int(coefs.b.shape[0]),
        "train_days": int(window.size),
    }


def forecast_workflow(data_path, train_days, out_dir, models=("cing",), seed=0,
                      schema=None, fill=None, cfg_overrides=None):
    """Forecast the last panel day from the window preceding it."""
    panel = load_series(data_path, schema=schema, fill=fill)
    cfg = BacktestConfig(train_days=train_days, test_days=1,
                         models=tuple(models), seed=seed, **(cfg_overrides or {}))
    t = panel.n_days - 1
    result = process_day(panel, t, cfg)
    if result.failures and not result.outputs:
        raise FailureBudgetExceeded(f"all models failed: {result.failures}")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "forecast.csv")
    with open(path, "w", newline="\n") as f:
        f.write("model,hour,mean,lo90,hi90\n")
        for model in models:
            if model not in result.outputs:
                continue
            out = result.outputs[model]
            for h in range(panel.hours_per_day):
                f.write(f"{model},{h + 1},{float(out.forecast[h])!r},"
                        f"{float(out.lower[h])!r},{float(out.upper[h])!r}\n")
    maes = {m: float(np.abs(o.forecast - result.actual).mean())
            for m, o in result.outputs.items()}
    return {
        "forecast_path": path,
        "day": (panel.start_date + dt.timedelta(days=t)).isoformat(),
        "mae_vs_actual": maes,
        "failures": result.failures,
    }


def backtest_workflow(data_path, out_dir, cfg: BacktestConfig, schema=None, fill=None):
    panel = load_series(data_path, schema=schema, fill=fill)
    report = run_sliding_window(panel, cfg)
    files = reporting.write_backtest_artifacts(report, out_dir, panel.start_date)
    summary = {
        "metrics": report.metrics,
        "failure_rate": report.failure_rate,
        "files": files,
        "n_test_days": len(report.days),
    }
    if report.failure_rate > FAILURE_BUDGET:
        raise FailureBudgetExceeded(
            f"{report.failure_rate:.1%} of model-days failed "
            f"(budget {FAILURE_BUDGET:.0%}); metrics written to {out_dir}"
        )
    return summary


def diagnose_workflow(coeffs_dir, data_path, train_days, out_dir, s_max=None,
                      feature=None, schema=None, fill=None):
    """theta curve + coefficient-correlation report from saved backtest coefficients."""
    files = sorted(
        os.path.join(coeffs_dir, f) for f in os.listdir(coeffs_dir)
        if f.endswith(".csv")
    )
    if not files:
        raise DataError(f"no coefficient CSVs under {coeffs_dir}")
    names = None
    history = []
    for f in files:
        nm, b, _ = reporting.read_coefficients_csv(f)
        if names is None:
            names = nm
        elif nm != names:
            raise DataError(f"coefficient layout mismatch in {f}")
        history.append(b)
    b_mean = np.mean(np.stack(history), axis=0)
    m = b_mean.shape[0]

    panel = load_series(data_path, schema=schema, fill=fill)
    window = _training_window(panel, train_days)
    from .backtest import BacktestConfig as _Cfg, _transformed_panel
    t_panel, _ = _transformed_panel(panel, window, _Cfg(train_days=train_days, test_days=1))
    design, _target = build_design(t_panel, window)
    if design.x.shape[1] != m:
        raise DataError(
            f"design has {design.x.shape[1]} columns but coefficients have {m} rows"
        )
    gram = (design.x.T @ design.x) / design.x.shape[0]

    n_active = int((np.linalg.norm(b_mean, axis=1) > 0).sum())
    s_hi = min(s_max or m - 2, m - 2, max(1, n_active))
    curve = []
    for s in range(1, s_hi + 1):
        try:
            curve += diagnostics.theta_curve(b_mean, gram, design.x.shape[0], [s])
        except (diagnostics.SingularCovariance, diagnostics.EmptySupport):
            break  # support grew past what the window can identify
    os.makedirs(out_dir, exist_ok=True)
    theta_path = os.path.join(out_dir, "theta.csv")
    reporting.write_theta_csv(curve, theta_path)

    if feature is None:
        feature_index = int(np.argmax(np.linalg.norm(b_mean, axis=1)))
    else:
        if feature not in names:
            raise DataError(f"unknown feature {feature!r}")
        feature_index = names.index(feature)
    if len(history) >= 2:
        corr, _deg = diagnostics.coefficient_correlation(history, feature_index)
    else:
        corr = np.zeros((b_mean.shape[1], b_mean.shape[1]))
    corr_path = os.path.join(out_dir, "corr.csv")
    reporting.write_correlation_csv(corr, corr_path, names[feature_index])
    return {
        "theta_path": theta_path,
        "corr_path": corr_path,
        "feature": names[feature_index],
        "n_matrices": len(history),
        "theta_first_last": [curve[0][1], curve[-1][1]] if curve else [],
    }
