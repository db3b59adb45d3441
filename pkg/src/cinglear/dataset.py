"""Aligned hourly panels of prices and exogenous series: CSV I/O and synthetic fixtures."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import (
    DataError,
    InvalidSpec,
    MissingHour,
    NonMonotonicTimestamps,
    UnknownColumn,
)

DEFAULT_EXOG_NAMES = ["load", "solar", "gas_gen", "fuel_price"]


@dataclass
class PanelDataset:
    """Rectangular hourly panel: prices plus K named exogenous series over N days."""

    start_date: dt.date
    hours_per_day: int
    prices: np.ndarray              # N x H
    exogenous: dict                 # name -> N x H array
    day_of_week: np.ndarray         # length N, ISO weekday 1..7

    def __post_init__(self):
        self.prices = np.asarray(self.prices, dtype=float)
        self.day_of_week = np.asarray(self.day_of_week, dtype=int)
        n, h = self.prices.shape
        if h != self.hours_per_day:
            raise DataError(f"prices have {h} columns, expected {self.hours_per_day}")
        for name, arr in self.exogenous.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (n, h):
                raise DataError(f"exogenous series {name!r} has shape {arr.shape}, expected {(n, h)}")
            self.exogenous[name] = arr
        if self.day_of_week.shape != (n,):
            raise DataError("day_of_week length must equal the number of days")
        if n > 0:
            expected = (self.day_of_week[0] - 1 + np.arange(n)) % 7 + 1
            if not np.array_equal(self.day_of_week, expected):
                raise DataError("day_of_week must advance cyclically by one per day")
        if not np.all(np.isfinite(self.prices)):
            raise DataError("prices contain non-finite values")
        for name, arr in self.exogenous.items():
            if not np.all(np.isfinite(arr)):
                raise DataError(f"exogenous series {name!r} contains non-finite values")

    @property
    def n_days(self) -> int:
        return self.prices.shape[0]

    @property
    def exog_names(self):
        return list(self.exogenous.keys())


def _fill_day(hours, values, n_cols, hours_per_day, fill, date):
    """Return one complete row of length hours_per_day x n_cols from possibly ragged hours."""
    out = np.full((hours_per_day, n_cols), np.nan)
    counts = np.zeros(hours_per_day, dtype=int)
    for h, row in zip(hours, values):
        if h >= hours_per_day:
            raise MissingHour(f"{date}: hour {h} outside 0..{hours_per_day - 1}")
        if counts[h] == 0:
            out[h] = row
        else:
            # duplicated hour (25-hour day): average the duplicates
            out[h] = (out[h] * counts[h] + row) / (counts[h] + 1)
        counts[h] += 1
    missing = np.where(counts == 0)[0]
    if missing.size and fill != "forward":
        raise MissingHour(f"{date}: {len(hours)} rows for a {hours_per_day}-hour day")
    if (counts > 1).any() and fill is None:
        raise MissingHour(f"{date}: duplicated hours present and no fill strategy configured")
    for h in missing:
        if h == 0:
            raise MissingHour(f"{date}: hour 0 missing, cannot forward-fill")
        out[h] = out[h - 1]
    return out


def load_series(path, schema=None, fill=None, hours_per_day=None) -> PanelDataset:
    """Load a CSV of hourly rows into a PanelDataset.

    schema maps roles to column names: {"timestamp": ..., "price": ...,
    "exogenous": [...]}; by default the price column is "lmp" and every other
    column is exogenous. hours_per_day defaults to the largest hour seen plus
    one. fill="forward" repairs short days by forward-filling and averages
    duplicated hours; without it incomplete days raise MissingHour.
    """
    schema = dict(schema or {})
    ts_col = schema.get("timestamp", "timestamp")
    price_col = schema.get("price", "lmp")
    df = pd.read_csv(path, float_precision="round_trip")
    for col in (ts_col, price_col):
        if col not in df.columns:
            raise UnknownColumn(f"column {col!r} not found in {path}")
    exog_cols = schema.get("exogenous")
    if exog_cols is None:
        exog_cols = [c for c in df.columns if c not in (ts_col, price_col)]
    else:
        for col in exog_cols:
            if col not in df.columns:
                raise UnknownColumn(f"column {col!r} not found in {path}")
    ts = pd.to_datetime(df[ts_col])
    if len(ts) == 0:
        raise DataError(f"{path}: no rows")
    diffs = ts.diff().dropna()
    if (diffs < pd.Timedelta(0)).any():
        raise NonMonotonicTimestamps(f"{path}: timestamps are not sorted")
    cols = [price_col] + list(exog_cols)
    for c in cols:
        if not np.all(np.isfinite(df[c].to_numpy(dtype=float))):
            raise DataError(f"{path}: column {c!r} has missing or non-finite values")
    values = df[cols].to_numpy(dtype=float)
    dates = ts.dt.date.to_numpy()
    hours = ts.dt.hour.to_numpy()
    if hours_per_day is None:
        hours_per_day = int(hours.max()) + 1

    day_rows = []
    day_dates = []
    start = 0
    for i in range(1, len(dates) + 1):
        if i == len(dates) or dates[i] != dates[start]:
            day_rows.append(
                _fill_day(hours[start:i], values[start:i], len(cols), hours_per_day,
                          fill, dates[start])
            )
            day_dates.append(dates[start])
            start = i
    for prev, cur in zip(day_dates, day_dates[1:]):
        if (cur - prev).days != 1:
            raise NonMonotonicTimestamps(f"non-consecutive dates {prev} -> {cur}")
    cube = np.stack(day_rows)  # N x H x cols
    dow = np.array([d.isoweekday() for d in day_dates], dtype=int)
    exog = {name: cube[:, :, 1 + k] for k, name in enumerate(exog_cols)}
    return PanelDataset(
        start_date=day_dates[0],
        hours_per_day=hours_per_day,
        prices=cube[:, :, 0],
        exogenous=exog,
        day_of_week=dow,
    )


def write_series(panel: PanelDataset, path, price_col="lmp"):
    """Write a PanelDataset back to the hourly CSV schema (one row per hour)."""
    names = panel.exog_names
    with open(path, "w", newline="\n") as f:
        f.write(",".join(["timestamp", price_col] + names) + "\n")
        for d in range(panel.n_days):
            date = panel.start_date + dt.timedelta(days=d)
            for h in range(panel.hours_per_day):
                stamp = f"{date.isoformat()}T{h:02d}:00:00"
                cells = [stamp, repr(float(panel.prices[d, h]))]
                cells += [repr(float(panel.exogenous[k][d, h])) for k in names]
                f.write(",".join(cells) + "\n")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic group-structured panel generator."""

    n_days: int
    hours_per_day: int = 24
    n_exog: int = 4
    support_size: int = 5
    noise_scale: float = 1.0
    coef_scale: float = 1.0
    seed: int = 0
    start_date: dt.date = field(default_factory=lambda: dt.date(2022, 1, 3))

    def __post_init__(self):
        if self.n_days < 1 or self.hours_per_day < 1 or self.n_exog < 0:
            raise InvalidSpec("n_days, hours_per_day must be >= 1 and n_exog >= 0")
        if self.noise_scale < 0:
            raise InvalidSpec("noise_scale must be >= 0")
        if not 0 <= self.support_size <= self.n_exog * self.hours_per_day:
            raise InvalidSpec(
                f"support_size must lie in [0, {self.n_exog * self.hours_per_day}]"
            )


def _exog_names(k):
    names = DEFAULT_EXOG_NAMES[:k]
    names += [f"exog{i + 1}" for i in range(len(names), k)]
    return names


def generate_synthetic(spec: SyntheticSpec):
    """Generate a panel whose prices follow a row-sparse linear model.

    The active features are drawn from the current-day exogenous block, so each
    selected hourly covariate influences the whole daily price profile (a dense
    coefficient row). Returns (panel, truth, support) where truth is the M x H
    coefficient matrix laid out as in features.build_design and support holds
    the indices of its nonzero rows.
    """
    rng = np.random.default_rng(spec.seed)
    n, h, k = spec.n_days, spec.hours_per_day, spec.n_exog
    names = _exog_names(k)
    exog = {name: rng.standard_normal((n, h)) for name in names}

    m = 4 * h + 3 * k * h + 7
    truth = np.zeros((m, h))
    block_start = 4 * h  # current-day exogenous columns come first among exog blocks
    candidates = np.arange(block_start, block_start + k * h)
    support = np.sort(rng.choice(candidates, size=spec.support_size, replace=False))
    for j in support:
        truth[j] = spec.coef_scale * rng.standard_normal(h)

    prices = spec.noise_scale * rng.standard_normal((n, h))
    for j in support:
        kk, hh = divmod(j - block_start, h)
        prices += np.outer(exog[names[kk]][:, hh], truth[j])

    dow = (spec.start_date.isoweekday() - 1 + np.arange(n)) % 7 + 1
    panel = PanelDataset(
        start_date=spec.start_date,
        hours_per_day=h,
        prices=prices,
        exogenous=exog,
        day_of_week=dow,
    )
    return panel, truth, support


def generate_regression_instance(n_rows, n_features, n_outputs, support_size,
                                 noise_scale, coef_scale=1.0, seed=0):
    """Plain row-sparse regression instance for recovery studies.

    X columns are i.i.d. standard Gaussian, centered and scaled so that
    (1/N) sum x^2 = 1, matching the solver's standardization contract.
    Returns (X, P, B_true, support).
    """
    if support_size > n_features:
        raise InvalidSpec("support_size cannot exceed n_features")
    if noise_scale < 0:
        raise InvalidSpec("noise_scale must be >= 0")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_rows, n_features))
    x -= x.mean(axis=0)
    x /= np.sqrt((x ** 2).mean(axis=0))
    b = np.zeros((n_features, n_outputs))
    support = np.sort(rng.choice(n_features, size=support_size, replace=False))
    b[support] = coef_scale * rng.standard_normal((support_size, n_outputs))
    p = x @ b + noise_scale * rng.standard_normal((n_rows, n_outputs))
    return x, p, b, support
