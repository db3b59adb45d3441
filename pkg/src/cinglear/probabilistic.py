"""Gaussian predictive distributions, sampling, intervals, and CRPS scoring.

Distributions live in transformed space (mean vector + HxH error covariance
from in-sample residuals); samples are mapped back to $/MWh through the
price scaler before scoring, so CRPS is reported in price units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyResiduals, InvalidLevel, NonPSD, TooFewSamples
from .preprocess import Scaler, inverse_transform

DEFAULT_N_SAMPLES = 20_000
JITTER_BASE = 1e-8
JITTER_ESCALATIONS = 3


@dataclass
class PredictiveDistribution:
    """Multivariate normal over the H hourly prices of one day."""

    mean: np.ndarray                 # length H, transformed units
    covariance: np.ndarray           # H x H
    scaler: Optional[Scaler] = None  # back-transform; None means raw units

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.covariance = np.asarray(self.covariance, dtype=float)
        h = self.mean.shape[0]
        if self.covariance.shape != (h, h):
            raise EmptyResiduals(f"covariance shape {self.covariance.shape} != ({h}, {h})")
        if np.abs(self.covariance - self.covariance.T).max() > 1e-12:
            raise NonPSD("covariance is not symmetric")

    def point_forecast(self):
        """Back-transformed mean, in price units."""
        if self.scaler is None:
            return self.mean.copy()
        return inverse_transform(self.scaler, self.mean)


def estimate_covariance(residuals):
    """Uncentered empirical covariance (1/N) sum_d e_d e_d' of daily residuals."""
    r = np.asarray(residuals, dtype=float)
    if r.ndim == 1:
        r = r[:, None]
    if r.shape[0] == 0:
        raise EmptyResiduals("no residual rows")
    return (r.T @ r) / r.shape[0]


def _cholesky_with_jitter(cov):
    h = cov.shape[0]
    tr = float(np.trace(cov))
    if tr == 0.0:
        return None  # degenerate: all samples collapse onto the mean
    jitter = JITTER_BASE * tr / h
    for _ in range(JITTER_ESCALATIONS + 1):
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(h))
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NonPSD(f"Cholesky failed after jitter escalation to {jitter:.3e}")


def sample(dist: PredictiveDistribution, n=DEFAULT_N_SAMPLES, seed=0):
    """Draw n joint samples, back-transformed to price units; deterministic per seed."""
    chol = _cholesky_with_jitter(dist.covariance)
    if chol is None:
        draws = np.tile(dist.mean, (n, 1))
    else:
        z = np.random.default_rng(seed).standard_normal((n, dist.mean.shape[0]))
        draws = dist.mean + z @ chol.T
    if dist.scaler is not None:
        draws = inverse_transform(dist.scaler, draws)
    return draws


def prediction_interval(dist: PredictiveDistribution, alpha,
                        n=DEFAULT_N_SAMPLES, seed=0):
    """Per-hour empirical (alpha/2, 1 - alpha/2) quantiles of the samples."""
    if not 0 < alpha < 1:
        raise InvalidLevel(f"alpha must be in (0, 1), got {alpha}")
    draws = sample(dist, n=n, seed=seed)
    lower = np.quantile(draws, alpha / 2, axis=0)
    upper = np.quantile(draws, 1 - alpha / 2, axis=0)
    return lower, upper


def crps_sample(samples, y):
    """Sample-based CRPS: mean |x - y| - mean pairwise |x - x'| / 2.

    The pairwise term is evaluated in O(n log n) from the sorted samples.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 2:
        raise TooFewSamples("need at least 2 samples")
    term1 = np.abs(x - y).mean()
    # sum_{i,j} |x_i - x_j| = 2 * sum_j (2j - n + 1) x_(j) over sorted samples
    weights = 2.0 * np.arange(n) - n + 1.0
    term2 = float(weights @ x) / (n * n)
    return float(term1 - term2)


def crps_gaussian_closed_form(mu, sigma, y):
    """Exact CRPS of N(mu, sigma^2) at y; degenerates to |y - mu| for sigma = 0."""
    if sigma < 0:
        raise InvalidLevel("sigma must be >= 0")
    if sigma == 0:
        return abs(y - mu)
    z = (y - mu) / sigma
    phi = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    cdf = 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * phi - 1.0 / math.sqrt(math.pi))
