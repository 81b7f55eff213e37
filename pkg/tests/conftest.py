import numpy as np
import pytest

from hjbfem import MarketParams


@pytest.fixture
def params():
    """Benchmark parameter set of the straddle-with-borrow-fees problem."""
    return MarketParams()


@pytest.fixture
def linear_params():
    """Parameters under which the control operators vanish identically."""
    return MarketParams(r_b=0.05, r_l=0.05, r_f=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
