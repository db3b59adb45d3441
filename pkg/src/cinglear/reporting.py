"""Deterministic on-disk artifacts for backtests, fits, and diagnostics.

All CSVs use '.' decimals, LF line endings, and repr() float formatting, so a
rerun with the same config is byte-identical. Nothing here embeds wall-clock
time.
"""
from __future__ import annotations

import dataclasses
import datetime as dt
import json
import os

import numpy as np

from .backtest import BacktestReport
from .solver import CoefficientMatrix


def _fmt(x):
    return repr(float(x))


def _date(panel_start, day_index):
    return (panel_start + dt.timedelta(days=int(day_index))).isoformat()


def write_metrics_csv(report: BacktestReport, path):
    with open(path, "w", newline="\n") as f:
        f.write("model,mae,rmse,crps,n_days\n")
        for model in report.config.models:
            m = report.metrics[model]
            f.write(f"{model},{_fmt(m['mae'])},{_fmt(m['rmse'])},"
                    f"{_fmt(m['crps'])},{m['n_days']}\n")


def write_forecasts_csv(report: BacktestReport, path, start_date):
    with open(path, "w", newline="\n") as f:
        f.write("date,model,hour,forecast,actual\n")
        for r in report.results:
            date = _date(start_date, r.day)
            for model in report.config.models:
                if model not in r.outputs:
                    continue
                out = r.outputs[model]
                for h in range(r.actual.shape[0]):
                    f.write(f"{date},{model},{h + 1},{_fmt(out.forecast[h])},"
                            f"{_fmt(r.actual[h])}\n")


def write_intervals_csv(report: BacktestReport, path, start_date):
    with open(path, "w", newline="\n") as f:
        f.write("date,model,hour,mean,lo90,hi90,crps\n")
        for r in report.results:
            date = _date(start_date, r.day)
            for model in report.config.models:
                if model not in r.outputs:
                    continue
                out = r.outputs[model]
                for h in range(r.actual.shape[0]):
                    f.write(f"{date},{model},{h + 1},{_fmt(out.forecast[h])},"
                            f"{_fmt(out.lower[h])},{_fmt(out.upper[h])},"
                            f"{_fmt(out.crps_per_hour[h])}\n")


def write_coefficients_csv(coefs: CoefficientMatrix, path):
    names = (coefs.layout.names if coefs.layout is not None
             else [f"feature_{j + 1}" for j in range(coefs.b.shape[0])])
    h = coefs.b.shape[1]
    with open(path, "w", newline="\n") as f:
        f.write("feature," + ",".join(f"h{i + 1}" for i in range(h)) + "\n")
        f.write("intercept," + ",".join(_fmt(v) for v in coefs.intercepts) + "\n")
        for name, row in zip(names, coefs.b):
            f.write(name + "," + ",".join(_fmt(v) for v in row) + "\n")


def read_coefficients_csv(path):
    """Inverse of write_coefficients_csv; returns (names, B, intercepts)."""
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    names = []
    rows = []
    intercepts = None
    for ln in lines[1:]:
        cells = ln.split(",")
        if cells[0] == "intercept":
            intercepts = np.array([float(v) for v in cells[1:]])
        else:
            names.append(cells[0])
            rows.append([float(v) for v in cells[1:]])
    return names, np.array(rows), intercepts


def config_dict(cfg):
    d = dataclasses.asdict(cfg)
    d["models"] = list(cfg.models)
    return d


def write_report_json(report: BacktestReport, path, start_date, extra=None):
    payload = {
        "config": config_dict(report.config),
        "start_date": start_date.isoformat(),
        "failure_rate": report.failure_rate,
        "metrics": report.metrics,
        "days": [
            {
                "date": _date(start_date, r.day),
                "lambda_opt": r.lambda_opt,
                "lear_lambdas": (None if r.lear_lambdas is None
                                 else [float(v) for v in r.lear_lambdas]),
                "failures": r.failures,
            }
            for r in report.results
        ],
    }
    if extra:
        payload.update(extra)
    with open(path, "w", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def write_backtest_artifacts(report: BacktestReport, out_dir, start_date):
    """metrics.csv, forecasts.csv, intervals.csv, coefficients/<date>.csv, report.json."""
    os.makedirs(out_dir, exist_ok=True)
    write_metrics_csv(report, os.path.join(out_dir, "metrics.csv"))
    write_forecasts_csv(report, os.path.join(out_dir, "forecasts.csv"), start_date)
    write_intervals_csv(report, os.path.join(out_dir, "intervals.csv"), start_date)
    coeff_dir = os.path.join(out_dir, "coefficients")
    written = []
    for r in report.results:
        if r.coefficients is not None:
            os.makedirs(coeff_dir, exist_ok=True)
            p = os.path.join(coeff_dir, f"{_date(start_date, r.day)}.csv")
            write_coefficients_csv(r.coefficients, p)
            written.append(p)
    write_report_json(report, os.path.join(out_dir, "report.json"), start_date)
    files = [os.path.join(out_dir, n)
             for n in ("metrics.csv", "forecasts.csv", "intervals.csv", "report.json")]
    return files + written


def write_theta_csv(curve, path):
    with open(path, "w", newline="\n") as f:
        f.write("s,theta\n")
        for s, theta in curve:
            f.write(f"{s},{_fmt(theta)}\n")


def write_correlation_csv(corr, path, feature_name):
    h = corr.shape[0]
    with open(path, "w", newline="\n") as f:
        f.write("feature," + ",".join(f"h{i + 1}" for i in range(h)) + "\n")
        for i in range(h):
            f.write(f"{feature_name}_h{i + 1}," +
                    ",".join(_fmt(v) for v in corr[i]) + "\n")
