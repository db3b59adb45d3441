"""Multi-output group lasso and per-hour lasso via block coordinate descent.

The objective is (1/N)||P - XB||_F^2 + lam * sum_j ||b_j||_2 over the rows of
B, so whole feature groups activate or vanish together. The per-hour lasso is
the H=1 special case (a one-element group's l2 norm is its absolute value).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import EmptyDesign, InvalidGrid, NonFiniteInput, TooFewRows
from .features import FeatureLayout

DEFAULT_N_LAMBDA = 100
DEFAULT_LAMBDA_RATIO = 1e-4
DEFAULT_MAX_ITER = 5000
DEFAULT_TOL = 1e-4
DEFAULT_KKT_TOL = 1e-4
DEFAULT_CV_FOLDS = 5


@dataclass
class CoefficientMatrix:
    """Jointly estimated coefficients: M x H matrix plus per-hour intercepts."""

    b: np.ndarray
    intercepts: np.ndarray = None
    layout: Optional[FeatureLayout] = None

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        if self.intercepts is None:
            self.intercepts = np.zeros(self.b.shape[1])
        self.intercepts = np.asarray(self.intercepts, dtype=float)

    @property
    def n_hours(self):
        return self.b.shape[1]

    def row_norms(self):
        return _kernels.row_norms(np.ascontiguousarray(self.b))

    def predict(self, x_row):
        """Point forecast for one standardized feature row."""
        return self.b.T @ np.asarray(x_row, dtype=float) + self.intercepts


@dataclass
class FitDiagnostics:
    iterations: int
    objective: float
    kkt_residual: float
    lam: float
    converged: bool
    objective_path: np.ndarray = field(repr=False, default=None)


def _check_inputs(x, p):
    x = np.ascontiguousarray(x, dtype=float)
    p = np.ascontiguousarray(p, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if x.ndim != 2 or x.size == 0:
        raise EmptyDesign("design matrix is empty")
    if p.shape[0] != x.shape[0]:
        raise EmptyDesign(f"X has {x.shape[0]} rows but P has {p.shape[0]}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(p)):
        raise NonFiniteInput("non-finite entries in the design or targets")
    return x, p


def group_soft_threshold(v, t):
    """0 if ||v|| <= t, else v shrunk by (1 - t/||v||)."""
    v = np.asarray(v, dtype=float)
    nrm = _kernels.row_norm(np.ascontiguousarray(v))
    if nrm <= t:
        return np.zeros_like(v)
    return (1.0 - t / nrm) * v


def lambda_max(x, p):
    """Smallest lam for which the all-zero coefficient matrix is optimal."""
    x, p = _check_inputs(x, p)
    n = x.shape[0]
    c2 = np.ascontiguousarray((2.0 / n) * (x.T @ p))
    return float(_kernels.row_norms(c2).max())


def lambda_grid(lam_max, n=DEFAULT_N_LAMBDA, ratio=DEFAULT_LAMBDA_RATIO):
    """Geometric grid of n values descending from lam_max to ratio*lam_max."""
    if not lam_max > 0:
        raise InvalidGrid(f"lambda_max must be positive, got {lam_max}")
    if n < 2 or not 0 < ratio < 1:
        raise InvalidGrid("need n >= 2 and 0 < ratio < 1")
    return lam_max * ratio ** (np.arange(n) / (n - 1))


class _GramState:
    """Cached Gram quantities shared across a lambda path on fixed (X, P)."""

    def __init__(self, x, p):
        x, p = _check_inputs(x, p)
        self.x, self.p = x, p
        n = x.shape[0]
        self.n = n
        self.g2 = np.ascontiguousarray((2.0 / n) * (x.T @ x))
        self.c2 = np.ascontiguousarray((2.0 / n) * (x.T @ p))
        self.c = np.ascontiguousarray(np.diag(self.g2).copy())
        self.pnorm2_n = float((p ** 2).sum() / n)

    @property
    def shape(self):
        return self.c2.shape

    def solve(self, lam, b0=None, tol=DEFAULT_TOL, kkt_tol=DEFAULT_KKT_TOL,
              max_iter=DEFAULT_MAX_ITER):
        m, h = self.c2.shape
        if b0 is None:
            b = np.zeros((m, h))
            q = np.zeros((m, h))
        else:
            b = np.ascontiguousarray(b0, dtype=float).copy()
            q = np.ascontiguousarray(self.g2 @ b)
        obj_path = np.empty(max_iter)
        sweeps, kkt, converged = _kernels.bcd_group_lasso(
            self.g2, self.c2, self.c, float(lam), b, q, self.pnorm2_n,
            float(tol), float(kkt_tol), int(max_iter), obj_path,
        )
        obj_path = obj_path[:sweeps].copy()
        rises = np.diff(obj_path)
        if rises.size and rises.max() > 1e-10 * max(1.0, abs(obj_path[0])):
            raise NonFiniteInput(
                f"objective increased across sweeps by {rises.max():.3e}"
            )
        diag = FitDiagnostics(
            iterations=int(sweeps),
            objective=float(obj_path[-1]) if sweeps else self.pnorm2_n,
            kkt_residual=float(kkt),
            lam=float(lam),
            converged=bool(converged),
            objective_path=obj_path,
        )
        return b, diag


def fit_group_lasso(x, p, lam, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                    kkt_tol=DEFAULT_KKT_TOL, b0=None):
    """Fit the group lasso at one lam; returns (CoefficientMatrix, FitDiagnostics)."""
    state = _GramState(x, p)
    b, diag = state.solve(lam, b0=b0, tol=tol, kkt_tol=kkt_tol, max_iter=max_iter)
    return CoefficientMatrix(b=b), diag


def fit_lasso_per_hour(x, p_hour, lam, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                       kkt_tol=DEFAULT_KKT_TOL, b0=None):
    """l1-penalized regression for one hour; returns (coef vector, FitDiagnostics)."""
    p_hour = np.asarray(p_hour, dtype=float)
    if p_hour.ndim != 1:
        raise EmptyDesign("p_hour must be a single target column")
    b0 = None if b0 is None else np.asarray(b0, dtype=float)[:, None]
    coefs, diag = fit_group_lasso(x, p_hour[:, None], lam, tol=tol,
                                  max_iter=max_iter, kkt_tol=kkt_tol, b0=b0)
    return coefs.b[:, 0], diag


def kkt_residual(x, p, b, lam):
    """Max group violation of the optimality conditions at coefficient matrix b."""
    x, p = _check_inputs(x, p)
    b = np.ascontiguousarray(b, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    n = x.shape[0]
    g = np.ascontiguousarray((2.0 / n) * (x.T @ (p - x @ b)))
    c = np.ascontiguousarray((2.0 / n) * (x ** 2).sum(axis=0))
    return float(_kernels.kkt_residual_state(g, c, b, lam))


@dataclass
class CVResult:
    lambda_opt: float
    grid: np.ndarray
    mean_errors: np.ndarray      # mean out-of-fold squared error per grid point
    fold_errors: np.ndarray      # n_folds x n_grid


def _contiguous_folds(n_rows, n_folds):
    return np.array_split(np.arange(n_rows), n_folds)


def cross_validate(x, p, n_folds=DEFAULT_CV_FOLDS, grid=None,
                   n_lambda=DEFAULT_N_LAMBDA, ratio=DEFAULT_LAMBDA_RATIO,
                   tol=DEFAULT_TOL, kkt_tol=DEFAULT_KKT_TOL,
                   max_iter=DEFAULT_MAX_ITER):
    """Select lam by K-fold CV with contiguous day blocks and warm-started paths.

    Ties within 1e-12 of the minimum mean error resolve toward the larger lam.
    """
    x, p = _check_inputs(x, p)
    n = x.shape[0]
    if n < n_folds:
        raise TooFewRows(f"{n} rows cannot form {n_folds} folds")
    if grid is None:
        lam_max = lambda_max(x, p)
        if lam_max == 0.0:
            return CVResult(0.0, np.zeros(1), np.zeros(1), np.zeros((n_folds, 1)))
        grid = lambda_grid(lam_max, n=n_lambda, ratio=ratio)
    grid = np.asarray(grid, dtype=float)
    folds = _contiguous_folds(n, n_folds)
    fold_errors = np.empty((n_folds, grid.size))
    for f, test_idx in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        state = _GramState(x[mask], p[mask])
        x_test, p_test = x[test_idx], p[test_idx]
        b = None
        for i, lam in enumerate(grid):
            b, _ = state.solve(lam, b0=b, tol=tol, kkt_tol=kkt_tol, max_iter=max_iter)
            resid = p_test - x_test @ b
            fold_errors[f, i] = float((resid ** 2).mean())
    mean_errors = fold_errors.mean(axis=0)
    best = mean_errors.min()
    idx = int(np.nonzero(mean_errors <= best + 1e-12)[0][0])  # grid is descending
    return CVResult(float(grid[idx]), grid, mean_errors, fold_errors)


def select_lambda(cv: CVResult, rule="min"):
    """Pick a lam from a CVResult.

    "min": the tie-broken minimizer already stored on the result. "1se": the
    largest lam whose mean error is within one standard error of the minimum,
    which favors sparser fits.
    """
    if rule == "min":
        return cv.lambda_opt
    if rule != "1se":
        raise InvalidGrid(f"unknown selection rule {rule!r}")
    k = cv.fold_errors.shape[0]
    if k < 2:
        return cv.lambda_opt
    se = cv.fold_errors.std(axis=0, ddof=1) / np.sqrt(k)
    best = int(cv.mean_errors.argmin())
    thresh = cv.mean_errors[best] + se[best]
    idx = int(np.nonzero(cv.mean_errors <= thresh)[0][0])  # grid is descending
    return float(cv.grid[idx])


def cross_validate_per_hour(x, p, **kwargs):
    """Independent CV per target column; returns a list of CVResult, one per hour."""
    x, p = _check_inputs(x, p)
    return [cross_validate(x, p[:, h], **kwargs) for h in range(p.shape[1])]


def fit_group_lasso_path(x, p, grid, tol=DEFAULT_TOL, kkt_tol=DEFAULT_KKT_TOL,
                         max_iter=DEFAULT_MAX_ITER):
    """Warm-started descent along a descending lam grid; yields (lam, B) pairs."""
    state = _GramState(x, p)
    b = None
    out = []
    for lam in np.asarray(grid, dtype=float):
        b, diag = state.solve(lam, b0=b, tol=tol, kkt_tol=kkt_tol, max_iter=max_iter)
        out.append((float(lam), b.copy(), diag))
    return out
