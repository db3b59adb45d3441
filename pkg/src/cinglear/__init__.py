"""Day-ahead electricity price forecasting with a multivariate group lasso.

Core modules: dataset (panels, CSV I/O, synthetic fixtures), preprocess
(median/MAD + asinh), features (design matrices), solver (group lasso and
per-hour lasso by block coordinate descent), baselines (naive/ARIMA family),
probabilistic (Gaussian predictive distributions, CRPS), backtest
(sliding-window evaluation), diagnostics (support recovery measures). The
service subpackage exposes everything over HTTP; the CLI is a thin client.
"""
from importlib.metadata import version as _version

__version__ = _version("cinglear")
