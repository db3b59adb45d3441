"""Support recovery diagnostics: overlap of active groups across hours and the
sample-complexity parameter derived from it.

The covariance entering the overlap functional is the design Gram matrix
(1/N) X'X restricted to the support; an error-covariance variant is available
through the `sigma` argument of theta_curve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySupport,
    InvalidDimensions,
    InvalidRule,
    SingularCovariance,
    TooFewMatrices,
)

POWER_ITERATION_CUTOFF = 256
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SupportSet:
    indices: tuple
    rule: str  # "threshold" | "top-s"

    def __len__(self):
        return len(self.indices)


def support(b, rule="threshold", s=None) -> SupportSet:
    """Selected feature groups of a coefficient matrix.

    "threshold": rows with strictly positive l2 norm (the solver zeroes rows
    atomically, so no tolerance is needed). "top-s": the s largest row norms,
    ties broken toward the lower index.
    """
    b = np.asarray(b, dtype=float)
    norms = np.linalg.norm(b, axis=1)
    if rule == "threshold":
        idx = np.nonzero(norms > 0)[0]
    elif rule == "top-s":
        if s is None or not 0 <= s <= b.shape[0]:
            raise InvalidRule(f"top-s rule needs 0 <= s <= {b.shape[0]}")
        order = np.lexsort((np.arange(len(norms)), -norms))  # stable on ties
        idx = np.sort(order[:s])
    else:
        raise InvalidRule(f"unknown rule {rule!r}")
    return SupportSet(indices=tuple(int(i) for i in idx), rule=rule)


def _spectral_norm(sym):
    """Largest eigenvalue magnitude of a symmetric matrix."""
    if sym.shape[0] <= POWER_ITERATION_CUTOFF:
        return float(np.abs(np.linalg.eigvalsh(sym)).max())
    v = np.ones(sym.shape[0]) / np.sqrt(sym.shape[0])
    est = 0.0
    for _ in range(1000):
        w = sym @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(nw - est) <= 1e-12 * max(1.0, nw):
            return float(nw)
        est = nw
    return float(est)


def sparsity_overlap(b, sigma_ss, support_idx):
    """Spectral norm of Z' Sigma_SS^{-1} Z with Z the row-normalized supported rows."""
    idx = np.asarray(
        support_idx.indices if isinstance(support_idx, SupportSet) else support_idx,
        dtype=int,
    )
    if idx.size == 0:
        raise EmptySupport("support set is empty")
    b = np.asarray(b, dtype=float)
    sigma_ss = np.asarray(sigma_ss, dtype=float)
    if sigma_ss.shape != (idx.size, idx.size):
        raise InvalidDimensions(
            f"Sigma_SS must be {idx.size}x{idx.size}, got {sigma_ss.shape}"
        )
    if np.linalg.cond(sigma_ss) > MAX_CONDITION:
        raise SingularCovariance("support covariance is numerically singular")
    rows = b[idx]
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise EmptySupport("a supported row has zero norm")
    z = rows / norms
    inner = z.T @ np.linalg.solve(sigma_ss, z)
    return _spectral_norm(0.5 * (inner + inner.T))


def sample_complexity(n, m, s, psi):
    """theta = N / (2 psi log(M - s)), natural log."""
    if m - s < 2:
        raise InvalidDimensions(f"need M - s >= 2, got M={m}, s={s}")
    if not psi > 0:
        raise InvalidDimensions(f"psi must be positive, got {psi}")
    return n / (2.0 * psi * np.log(m - s))


def theta_curve(b, sigma, n, s_range):
    """Sample-complexity diagnostic over support sizes.

    For each s: take the top-s rows of b, restrict sigma (the M x M design
    covariance) to them, and evaluate theta. Returns a list of (s, theta).
    """
    b = np.asarray(b, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    m = b.shape[0]
    if sigma.shape != (m, m):
        raise InvalidDimensions(f"sigma must be {m}x{m}, got {sigma.shape}")
    out = []
    for s in s_range:
        if not 1 <= s <= m - 2:
            raise InvalidDimensions(f"support size {s} outside [1, {m - 2}]")
        sup = support(b, rule="top-s", s=s)
        idx = np.asarray(sup.indices)
        psi = sparsity_overlap(b, sigma[np.ix_(idx, idx)], sup)
        out.append((int(s), float(sample_complexity(n, m, s, psi))))
    return out


def coefficient_correlation(b_history, feature_index):
    """Pearson correlation between hourly coefficient paths of one feature.

    b_history holds the per-day coefficient matrices of a backtest; the result
    is H x H. Zero-variance hours yield 0 entries and are reported in the
    returned degenerate mask.
    """
    mats = [np.asarray(b, dtype=float) for b in b_history]
    if len(mats) < 2:
        raise TooFewMatrices("need at least 2 coefficient matrices")
    series = np.stack([m[feature_index] for m in mats])  # L x H
    centered = series - series.mean(axis=0)
    std = centered.std(axis=0)
    degenerate = std == 0.0
    safe = np.where(degenerate, 1.0, std)
    z = centered / safe
    corr = (z.T @ z) / series.shape[0]
    corr[degenerate, :] = 0.0
    corr[:, degenerate] = 0.0
    np.fill_diagonal(corr, np.where(degenerate, 0.0, 1.0))
    corr = np.clip(corr, -1.0, 1.0)
    return corr, degenerate
