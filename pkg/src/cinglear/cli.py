"""Thin command-line client for the forecasting service.

By default requests run against an in-process instance of the FastAPI app, so
no server needs to be running; pass --server to talk to a remote instance
(paths in requests are then resolved on the server). Exit codes: 1 usage,
2 data error, 3 numerical failure.
"""
from __future__ import annotations

import json
import sys

import click
import httpx

from . import __version__

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

DEFAULTS = {
    "train_days": 1095,  # three calendar years where the data permits
    "cv_folds": 5,
    "n_lambda": 100,
    "max_iter": 5000,
    "seed": 0,
}


class ClientError(Exception):
    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app, raise_server_exceptions=False)


def _call(ctx, path, payload):
    with _client(ctx.obj.get("server")) as client:
        resp = client.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except Exception:
        detail = resp.text
    if isinstance(detail, dict):
        kind = detail.get("kind")
        message = detail.get("message", str(detail))
        code = EXIT_NUMERICAL if kind == "numerical" else EXIT_DATA
        raise ClientError(message, code)
    raise ClientError(str(detail), EXIT_USAGE if resp.status_code == 422 else EXIT_DATA)


def _load_config(path):
    """Optional key=value file; CLI flags take precedence over its entries."""
    if not path:
        return {}
    out = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ClientError(f"bad config line: {line!r}", EXIT_USAGE)
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(ctx, key, flag_value, cast=int):
    if flag_value is not None:
        return flag_value
    cfgfile = ctx.obj.get("config", {})
    if key in cfgfile:
        return cast(cfgfile[key])
    return DEFAULTS.get(key)


@click.group()
@click.version_option(__version__, prog_name="cinglear")
@click.option("--server", default=None, metavar="URL",
              help="Remote service URL; defaults to running in-process.")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="Optional key=value config file (flags override it).")
@click.pass_context
def cli(ctx, server, config_path):
    """Day-ahead electricity price forecasting toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["config"] = _load_config(config_path)


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--days", required=True, type=int)
@click.option("--hours", default=24, type=int)
@click.option("--exog", default=4, type=int)
@click.option("--support", default=5, type=int)
@click.option("--noise", default=1.0, type=float)
@click.option("--coef-scale", default=1.0, type=float)
@click.option("--seed", default=None, type=int)
@click.pass_context
def synth(ctx, out_dir, days, hours, exog, support, noise, coef_scale, seed):
    """Generate a synthetic panel CSV plus its ground-truth coefficients."""
    out = _call(ctx, "/synth", {
        "out_dir": out_dir, "days": days, "hours": hours, "exog": exog,
        "support": support, "noise": noise, "coef_scale": coef_scale,
        "seed": _resolve(ctx, "seed", seed),
    })
    click.echo(f"synth: {out['n_days']} days -> {out['data_path']} "
               f"(truth {out['truth_path']}, support {out['support_features']})")


def _common_solver(ctx, folds, n_lambda, max_iter):
    return {
        "cv_folds": _resolve(ctx, "cv_folds", folds),
        "n_lambda": _resolve(ctx, "n_lambda", n_lambda),
        "max_iter": _resolve(ctx, "max_iter", max_iter),
    }


def _data_options(fill, raw_exogenous, no_transform, price_column):
    return {
        "fill": fill,
        "price_column": price_column,
        "use_transform": not no_transform,
        "transform_exogenous": not raw_exogenous,
    }


_shared = [
    click.option("--data", required=True, type=click.Path()),
    click.option("--train-days", default=None, type=int),
    click.option("--folds", default=None, type=int),
    click.option("--n-lambda", default=None, type=int),
    click.option("--max-iter", default=None, type=int),
    click.option("--fill", default=None, type=click.Choice(["forward"])),
    click.option("--raw-exogenous", is_flag=True, default=False),
    click.option("--no-transform", is_flag=True, default=False),
    click.option("--price-column", default=None),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@cli.command()
@shared_options
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--model", default="cing", type=click.Choice(["cing", "lear"]))
@click.option("--lam", default=None, type=float, help="Skip CV and fit at this value.")
@click.pass_context
def fit(ctx, data, train_days, folds, n_lambda, max_iter, fill, raw_exogenous,
        no_transform, price_column, out_dir, model, lam):
    """Fit one coefficient matrix on the trailing training window."""
    out = _call(ctx, "/fit", {
        "data": data, "out_dir": out_dir, "model": model, "lam": lam,
        "train_days": _resolve(ctx, "train_days", train_days),
        "solver": _common_solver(ctx, folds, n_lambda, max_iter),
        "data_options": _data_options(fill, raw_exogenous, no_transform, price_column),
    })
    click.echo(f"fit: {model} lambda={out['lambda']} "
               f"active {out['n_active_groups']}/{out['n_groups']} groups "
               f"-> {out['coefficients_path']}")


@cli.command()
@shared_options
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--models", default="cing", metavar="LIST")
@click.option("--seed", default=None, type=int)
@click.pass_context
def forecast(ctx, data, train_days, folds, n_lambda, max_iter, fill,
             raw_exogenous, no_transform, price_column, out_dir, models, seed):
    """Forecast the last day of the panel from the window preceding it."""
    out = _call(ctx, "/forecast", {
        "data": data, "out_dir": out_dir, "models": models.split(","),
        "seed": _resolve(ctx, "seed", seed),
        "train_days": _resolve(ctx, "train_days", train_days),
        "solver": _common_solver(ctx, folds, n_lambda, max_iter),
        "data_options": _data_options(fill, raw_exogenous, no_transform, price_column),
    })
    maes = " ".join(f"{m}={v:.3f}" for m, v in sorted(out["mae_vs_actual"].items()))
    click.echo(f"forecast {out['day']}: MAE {maes} -> {out['forecast_path']}")


@cli.command()
@shared_options
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--test-days", required=True, type=int)
@click.option("--models", default="snaive,lear,cing", metavar="LIST")
@click.option("--seed", default=None, type=int)
@click.option("--n-samples", default=20000, type=int)
@click.option("--refresh-lambda", default=1, type=int,
              help="Re-select lambda every k days (1 = daily).")
@click.option("--jobs", default=1, type=int)
@click.pass_context
def backtest(ctx, data, train_days, folds, n_lambda, max_iter, fill,
             raw_exogenous, no_transform, price_column, out_dir, test_days,
             models, seed, n_samples, refresh_lambda, jobs):
    """Sliding-window backtest over the last --test-days days."""
    out = _call(ctx, "/backtest", {
        "data": data, "out_dir": out_dir, "test_days": test_days,
        "models": models.split(","), "seed": _resolve(ctx, "seed", seed),
        "n_samples": n_samples, "refresh_lambda": refresh_lambda, "jobs": jobs,
        "train_days": _resolve(ctx, "train_days", train_days),
        "solver": _common_solver(ctx, folds, n_lambda, max_iter),
        "data_options": _data_options(fill, raw_exogenous, no_transform, price_column),
    })
    parts = [
        f"{m} MAE={v['mae']:.3f} RMSE={v['rmse']:.3f} CRPS={v['crps']:.3f}"
        for m, v in out["metrics"].items()
    ]
    click.echo(f"backtest: {out['n_test_days']} days | " + " | ".join(parts)
               + f" | out {out_dir}")


@cli.command()
@click.option("--coeffs", "coeffs_dir", required=True, type=click.Path())
@click.option("--data", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--train-days", default=None, type=int)
@click.option("--s-max", default=None, type=int)
@click.option("--feature", default=None)
@click.option("--fill", default=None, type=click.Choice(["forward"]))
@click.pass_context
def diagnose(ctx, coeffs_dir, data, out_dir, train_days, s_max, feature, fill):
    """Sample-complexity curve and coefficient correlations from saved coefficients."""
    out = _call(ctx, "/diagnose", {
        "coeffs_dir": coeffs_dir, "data": data, "out_dir": out_dir,
        "train_days": _resolve(ctx, "train_days", train_days),
        "s_max": s_max, "feature": feature,
        "data_options": {"fill": fill},
    })
    click.echo(f"diagnose: {out['n_matrices']} matrices, feature {out['feature']} "
               f"-> {out['theta_path']}, {out['corr_path']}")


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn
    from .service import app
    uvicorn.run(app, host=host, port=port)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except ClientError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
