"""Robust normalization and asinh variance-stabilizing transform.

Prices are shifted by the in-sample median, scaled by the MAD (times the
Gaussian consistency factor 1.4826), then passed through the inverse
hyperbolic sine. The transform is monotone and defined for negative prices.
"""
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput

MAD_FACTOR = 1.4826


@dataclass(frozen=True)
class Scaler:
    """Location/scale pair; immutable once fitted."""

    a: float
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"scale must be positive, got {self.b}")


def fit_scaler(values) -> Scaler:
    """Fit location = median, scale = 1.4826 * MAD (1.0 if the MAD is zero)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInput("cannot fit a scaler on an empty sequence")
    a = float(np.median(v))
    mad = float(np.median(np.abs(v - a)))
    b = MAD_FACTOR * mad if mad > 0 else 1.0
    return Scaler(a=a, b=b)


def transform(scaler: Scaler, values):
    """asinh((v - a) / b), elementwise over arrays."""
    u = (np.asarray(values, dtype=float) - scaler.a) / scaler.b
    return np.arcsinh(u)


def inverse_transform(scaler: Scaler, values):
    """a + b * sinh(t); exact inverse of transform."""
    t = np.asarray(values, dtype=float)
    return scaler.a + scaler.b * np.sinh(t)
