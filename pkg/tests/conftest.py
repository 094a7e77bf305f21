import os

import numpy as np
import pytest
from scipy.stats import ortho_group

from gfiselect.design import standardize


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GFISELECT_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow simulation check; set GFISELECT_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def random_design(rng, n, p, center=False, signal=None, noise=1.0):
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    if signal is not None:
        beta[: len(signal)] = signal
    y = X @ beta + noise * rng.standard_normal(n)
    return standardize(y, X, center=center)


def orthonormal_design(rng, n, p, y=None):
    Q = ortho_group.rvs(n, random_state=rng)[:, :p]
    if y is None:
        y = rng.standard_normal(n)
    return standardize(y, Q)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
