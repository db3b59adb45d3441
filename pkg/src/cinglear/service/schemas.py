"""Pydantic request/response models for the forecasting service."""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class SynthRequest(BaseModel):
    out_dir: str
    days: int = Field(ge=1)
    hours: int = Field(default=24, ge=1)
    exog: int = Field(default=4, ge=0)
    support: int = Field(default=5, ge=0)
    noise: float = Field(default=1.0, ge=0.0)
    coef_scale: float = 1.0
    seed: int = 0


class SynthResponse(BaseModel):
    data_path: str
    truth_path: str
    n_days: int
    support: List[int]
    support_features: List[str]


class SolverOptions(BaseModel):
    cv_folds: int = 5
    n_lambda: int = 100
    lambda_ratio: float = 1e-4
    max_iter: int = 5000
    tol: float = 1e-4
    kkt_tol: float = 1e-4


class DataOptions(BaseModel):
    fill: Optional[str] = None           # None or "forward"
    price_column: Optional[str] = None
    use_transform: bool = True
    transform_exogenous: bool = True


class FitRequest(BaseModel):
    data: str
    out_dir: str
    train_days: int = Field(ge=5)
    model: str = "cing"
    lam: Optional[float] = None
    solver: SolverOptions = SolverOptions()
    data_options: DataOptions = DataOptions()


class FitResponse(BaseModel):
    coefficients_path: str
    layout_path: str
    lam: object = Field(alias="lambda")
    n_active_groups: int
    n_groups: int
    train_days: int

    model_config = {"populate_by_name": True}


class ForecastRequest(BaseModel):
    data: str
    out_dir: str
    train_days: int = Field(ge=5)
    models: List[str] = ["cing"]
    seed: int = 0
    solver: SolverOptions = SolverOptions()
    data_options: DataOptions = DataOptions()


class ForecastResponse(BaseModel):
    forecast_path: str
    day: str
    mae_vs_actual: Dict[str, float]
    failures: Dict[str, str]


class BacktestRequest(BaseModel):
    data: str
    out_dir: str
    train_days: int = Field(ge=5)
    test_days: int = Field(ge=1)
    models: List[str] = ["snaive", "lear", "cing"]
    seed: int = 0
    n_samples: int = 20_000
    refresh_lambda: int = 1
    jobs: int = 1
    solver: SolverOptions = SolverOptions()
    data_options: DataOptions = DataOptions()


class ModelMetrics(BaseModel):
    mae: float
    rmse: float
    crps: float
    n_days: int


class BacktestResponse(BaseModel):
    metrics: Dict[str, ModelMetrics]
    failure_rate: float
    files: List[str]
    n_test_days: int


class DiagnoseRequest(BaseModel):
    coeffs_dir: str
    data: str
    out_dir: str
    train_days: int = Field(ge=5)
    s_max: Optional[int] = None
    feature: Optional[str] = None
    data_options: DataOptions = DataOptions()


class DiagnoseResponse(BaseModel):
    theta_path: str
    corr_path: str
    feature: str
    n_matrices: int
    theta_first_last: List[float]


class VersionResponse(BaseModel):
    name: str
    version: str
