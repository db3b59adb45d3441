"""FastAPI service wrapping the forecasting workflows.

Paths in requests refer to the filesystem of the process running the service;
the CLI talks to this app in-process by default, so local paths just work.
Data problems map to HTTP 400, numerical failures to HTTP 500, both with a
structured {"kind", "message"} detail.
"""
from importlib.metadata import version as pkg_version

from fastapi import FastAPI, HTTPException

from .. import workflows
from ..backtest import BacktestConfig
from ..errors import DataError, NumericalError
from . import schemas

app = FastAPI(title="cinglear", description="Day-ahead electricity price forecasting service")


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DataError, FileNotFoundError) as exc:
        raise HTTPException(400, {"kind": "data", "message": str(exc)})
    except NumericalError as exc:
        raise HTTPException(500, {"kind": "numerical", "message": str(exc)})


def _schema(opts: schemas.DataOptions):
    if opts.price_column:
        return {"price": opts.price_column}
    return None


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/version", response_model=schemas.VersionResponse)
def version():
    return {"name": "cinglear", "version": pkg_version("cinglear")}


@app.post("/synth", response_model=schemas.SynthResponse)
def synth(req: schemas.SynthRequest):
    return _run(
        workflows.synth_workflow,
        out_dir=req.out_dir, days=req.days, hours=req.hours, exog=req.exog,
        support=req.support, noise=req.noise, coef_scale=req.coef_scale,
        seed=req.seed,
    )


def _solver_overrides(solver: schemas.SolverOptions, data: schemas.DataOptions):
    return {
        "cv_folds": solver.cv_folds,
        "n_lambda": solver.n_lambda,
        "lambda_ratio": solver.lambda_ratio,
        "max_iter": solver.max_iter,
        "tol": solver.tol,
        "kkt_tol": solver.kkt_tol,
        "use_transform": data.use_transform,
        "transform_exogenous": data.transform_exogenous,
    }


@app.post("/fit", response_model=schemas.FitResponse)
def fit(req: schemas.FitRequest):
    out = _run(
        workflows.fit_workflow,
        data_path=req.data, train_days=req.train_days, out_dir=req.out_dir,
        model=req.model, lam=req.lam, schema=_schema(req.data_options),
        fill=req.data_options.fill,
        cfg_overrides=_solver_overrides(req.solver, req.data_options),
    )
    return out


@app.post("/forecast", response_model=schemas.ForecastResponse)
def forecast(req: schemas.ForecastRequest):
    return _run(
        workflows.forecast_workflow,
        data_path=req.data, train_days=req.train_days, out_dir=req.out_dir,
        models=tuple(req.models), seed=req.seed, schema=_schema(req.data_options),
        fill=req.data_options.fill,
        cfg_overrides=_solver_overrides(req.solver, req.data_options),
    )


@app.post("/backtest", response_model=schemas.BacktestResponse)
def backtest(req: schemas.BacktestRequest):
    def go():
        cfg = BacktestConfig(
            train_days=req.train_days, test_days=req.test_days,
            cv_folds=req.solver.cv_folds, n_lambda=req.solver.n_lambda,
            lambda_ratio=req.solver.lambda_ratio, max_iter=req.solver.max_iter,
            tol=req.solver.tol, kkt_tol=req.solver.kkt_tol,
            models=tuple(req.models), seed=req.seed, n_samples=req.n_samples,
            use_transform=req.data_options.use_transform,
            transform_exogenous=req.data_options.transform_exogenous,
            refresh_lambda=req.refresh_lambda, jobs=req.jobs,
        )
        return workflows.backtest_workflow(
            req.data, req.out_dir, cfg,
            schema=_schema(req.data_options), fill=req.data_options.fill,
        )
    return _run(go)


@app.post("/diagnose", response_model=schemas.DiagnoseResponse)
def diagnose(req: schemas.DiagnoseRequest):
    return _run(
        workflows.diagnose_workflow,
        coeffs_dir=req.coeffs_dir, data_path=req.data,
        train_days=req.train_days, out_dir=req.out_dir, s_max=req.s_max,
        feature=req.feature, schema=_schema(req.data_options),
        fill=req.data_options.fill,
    )
