import numpy as np
import pytest

from cinglear.dataset import SyntheticSpec, generate_synthetic


@pytest.fixture(scope="session")
def small_panel():
    """60-day, 6-hour panel with a 3-row true support; shared read-only."""
    spec = SyntheticSpec(n_days=60, hours_per_day=6, n_exog=2, support_size=3,
                         noise_scale=0.5, seed=3)
    panel, truth, support = generate_synthetic(spec)
    return panel, truth, support


@pytest.fixture
def rng():
    return np.random.default_rng(0)
