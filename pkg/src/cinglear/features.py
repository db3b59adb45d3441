"""Feature-vector and design-matrix construction.

For day d the regressors are the price profiles of days d-1, d-2, d-3, d-7,
the exogenous day-ahead forecasts for days d, d-1, d-7, and seven day-of-week
dummies, giving M = 4H + 3KH + 7 columns. Non-dummy columns are centered and
scaled to (1/N) sum x^2 = 1; targets are centered per hour and the means kept
as intercepts.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import PanelDataset
from .errors import EmptyDesign, InsufficientHistory, NonFiniteInput

PRICE_LAGS = (1, 2, 3, 7)
EXOG_LAGS = (0, 1, 7)
MIN_HISTORY = 7  # day index must be >= 7 so that lag-7 exists


@dataclass(frozen=True)
class Feature:
    name: str
    kind: str       # "price" | "exog" | "dummy"
    source: str     # series name, or "dow"
    lag: int        # days; 0 for current-day forecasts and dummies
    index: int      # hour (0-based) or dummy weekday (1..7)


@dataclass(frozen=True)
class FeatureLayout:
    """Ordered column layout of the design matrix; identical for every day."""

    hours_per_day: int
    exog_names: tuple
    features: tuple  # of Feature

    @property
    def width(self) -> int:
        return len(self.features)

    @property
    def names(self):
        return [f.name for f in self.features]

    def dummy_mask(self):
        return np.array([f.kind == "dummy" for f in self.features])

    def manifest(self) -> str:
        return "\n".join(self.names) + "\n"


def make_layout(hours_per_day, exog_names) -> FeatureLayout:
    h = hours_per_day
    feats = []
    for lag in PRICE_LAGS:
        for hr in range(h):
            feats.append(Feature(f"price_lag{lag}_h{hr + 1}", "price", "price", lag, hr))
    for lag in EXOG_LAGS:
        for name in exog_names:
            for hr in range(h):
                feats.append(Feature(f"{name}_lag{lag}_h{hr + 1}", "exog", name, lag, hr))
    for j in range(1, 8):
        feats.append(Feature(f"dow_{j}", "dummy", "dow", 0, j))
    return FeatureLayout(h, tuple(exog_names), tuple(feats))


def build_feature_vector(panel: PanelDataset, d, layout: FeatureLayout = None):
    """Raw (unstandardized) feature row for predicting day d."""
    if d < MIN_HISTORY:
        raise InsufficientHistory(f"day {d} lacks a lag-7 history")
    if d >= panel.n_days:
        raise InsufficientHistory(f"day {d} outside the panel (n_days={panel.n_days})")
    layout = layout or make_layout(panel.hours_per_day, panel.exog_names)
    out = np.empty(layout.width)
    for i, f in enumerate(layout.features):
        if f.kind == "price":
            out[i] = panel.prices[d - f.lag, f.index]
        elif f.kind == "exog":
            out[i] = panel.exogenous[f.source][d - f.lag, f.index]
        else:
            out[i] = 1.0 if panel.day_of_week[d] == f.index else 0.0
    return out


@dataclass
class DesignMatrix:
    """Standardized design over a window, with the stats needed to reuse it."""

    x: np.ndarray            # N x M_kept, standardized
    layout: FeatureLayout    # layout of the kept columns
    column_mean: np.ndarray
    column_scale: np.ndarray
    kept: np.ndarray         # indices into the canonical layout
    dropped: tuple           # names of dropped zero-variance columns

    @property
    def n_rows(self):
        return self.x.shape[0]

    def standardize_row(self, raw):
        """Apply the recorded column stats to one canonical raw feature row."""
        v = np.asarray(raw, dtype=float)[self.kept]
        return (v - self.column_mean) / self.column_scale


@dataclass
class TargetMatrix:
    p: np.ndarray            # N x H, centered per hour
    hour_means: np.ndarray   # length H


def build_design(panel: PanelDataset, days, prices=None):
    """Build (DesignMatrix, TargetMatrix) over the given day indices.

    `prices` overrides the target matrix rows (e.g. already-transformed
    values); feature rows always come from the panel itself.
    """
    days = np.asarray(list(days), dtype=int)
    if days.size == 0:
        raise EmptyDesign("empty training window")
    if days.min() < MIN_HISTORY:
        raise InsufficientHistory("window contains days without a lag-7 history")
    layout = make_layout(panel.hours_per_day, panel.exog_names)
    x = np.stack([build_feature_vector(panel, d, layout) for d in days])
    p = (prices if prices is not None else panel.prices)[days].astype(float).copy()
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(p)):
        raise NonFiniteInput("design or target contains non-finite values")

    dummy = layout.dummy_mask()
    mean = np.where(dummy, 0.0, x.mean(axis=0))
    centered = x - mean
    scale = np.sqrt((centered ** 2).mean(axis=0))
    degenerate = (~dummy) & (scale == 0.0)
    if degenerate.any():
        names = [layout.features[i].name for i in np.where(degenerate)[0]]
        warnings.warn(f"dropping zero-variance columns: {names}", stacklevel=2)
    keep = ~degenerate
    scale = np.where(dummy | degenerate, 1.0, scale)
    x_std = centered / scale

    kept_idx = np.where(keep)[0]
    kept_layout = FeatureLayout(
        layout.hours_per_day,
        layout.exog_names,
        tuple(layout.features[i] for i in kept_idx),
    )
    design = DesignMatrix(
        x=x_std[:, keep],
        layout=kept_layout,
        column_mean=mean[keep],
        column_scale=scale[keep],
        kept=kept_idx,
        dropped=tuple(layout.features[i].name for i in np.where(degenerate)[0]),
    )
    hour_means = p.mean(axis=0)
    return design, TargetMatrix(p=p - hour_means, hour_means=hour_means)
