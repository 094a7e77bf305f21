import numpy as np
import pytest

from gfiselect.design import standardize
from gfiselect.enet import ElasticNetConfig, cv_elastic_net, elastic_net_weights, enet_path, lambda_grid


def _soft(z, t):
    return np.sign(z) * max(abs(z) - t, 0.0)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0])
def test_univariate_closed_form(rng, alpha):
    n = 40
    x = rng.standard_normal((n, 1))
    y = 0.7 * x[:, 0] + rng.standard_normal(n)
    lams = lambda_grid(x, y, alpha, 20)
    path = enet_path(x, y, lams, alpha)
    for lam, b in zip(lams, path[:, 0]):
        expected = _soft(x[:, 0] @ y / n, lam * alpha) / (x[:, 0] @ x[:, 0] / n + lam * (1 - alpha))
        assert b == pytest.approx(expected, abs=1e-8)


def test_first_grid_point_is_null_fit(rng):
    X, y = rng.standard_normal((30, 6)), rng.standard_normal(30)
    lams = lambda_grid(X, y, 0.5, 10)
    path = enet_path(X, y, lams, 0.5)
    assert np.all(path[0] == 0.0)
    assert np.any(path[-1] != 0.0)


def test_path_satisfies_optimality_conditions(rng):
    n, p, alpha = 50, 8, 0.5
    X, y = rng.standard_normal((n, p)), rng.standard_normal(n) + rng.standard_normal((n, p))[:, :2].sum(axis=1)
    lams = lambda_grid(X, y, alpha, 15)
    for lam, b in zip(lams, enet_path(X, y, lams, alpha, tol=1e-12)):
        g = X.T @ (y - X @ b) / n - lam * (1 - alpha) * b
        on = b != 0
        np.testing.assert_allclose(g[on], lam * alpha * np.sign(b[on]), atol=1e-6)
        assert np.all(np.abs(g[~on]) <= lam * alpha + 1e-6)


def test_dominant_weight_for_exact_signal(rng):
    X = rng.standard_normal((100, 10))
    d = standardize(X[:, 0].copy(), X)
    w = elastic_net_weights(d).w
    assert np.argmax(w) == 0
    assert w[0] > 10 * np.max(w[1:])


def test_null_signal_weights_positive(rng):
    d = standardize(rng.standard_normal(50), rng.standard_normal((50, 12)))
    w = elastic_net_weights(d).w
    assert np.all(w >= 50**-2.0)


def test_cv_is_seeded(rng):
    d = standardize(rng.standard_normal(40), rng.standard_normal((40, 5)))
    a = cv_elastic_net(d, ElasticNetConfig(seed=3))
    b = cv_elastic_net(d, ElasticNetConfig(seed=3))
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1] == b[1]


def test_config_validation(rng):
    d = standardize(rng.standard_normal(10), rng.standard_normal((10, 3)))
    with pytest.raises(ValueError):
        cv_elastic_net(d, ElasticNetConfig(cv_folds=11))
    with pytest.raises(ValueError):
        cv_elastic_net(d, ElasticNetConfig(alpha_mix=0.0))
