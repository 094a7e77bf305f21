import math

import numpy as np
import pytest
from scipy.stats import ortho_group

from gfiselect.design import fit_model, standardize
from gfiselect.fiducial import Degenerate, estimate_e_h, log_base_score, sample_beta_t
from gfiselect.l0 import default_epsilon

from conftest import random_design

# log(pi^{3/2} Gamma(11) 7.25^{-21/2}), evaluated with mpmath at 40 digits.
LOG_BASE_REFERENCE = -3.979008021249510231221631432897705488754


class _Fit:
    def __init__(self, size, rss):
        self.size, self.rss = size, rss


def test_log_base_direct_substitution():
    assert log_base_score(_Fit(2, 1.0), 10) == pytest.approx(math.log(math.pi) + math.log(6.0), rel=1e-14)


def test_log_base_high_precision_reference():
    assert log_base_score(_Fit(3, 7.25), 25) == pytest.approx(LOG_BASE_REFERENCE, abs=1e-10)


def test_log_base_difference_equal_sizes(rng):
    d = random_design(rng, 20, 5, signal=[1.0])
    f1, f2 = fit_model(d, (0, 1)), fit_model(d, (2, 3))
    diff = log_base_score(f1, 20) - log_base_score(f2, 20)
    assert diff == pytest.approx(-(20 - 2 - 1) / 2 * math.log(f1.rss / f2.rss), rel=1e-12)


def test_log_base_degenerate():
    with pytest.raises(Degenerate):
        log_base_score(_Fit(2, 0.0), 10)
    with pytest.raises(Degenerate):
        log_base_score(_Fit(9, 1.0), 10)


def test_log_base_row_orthogonal_invariance(rng):
    X, y = rng.standard_normal((14, 4)), rng.standard_normal(14)
    U = ortho_group.rvs(14, random_state=rng)
    d1, d2 = standardize(y, X), standardize(U @ y, U @ X)
    for M in [(0,), (1, 3), (0, 2, 3)]:
        a = log_base_score(fit_model(d1, M), 14)
        b = log_base_score(fit_model(d2, M), 14)
        assert a == pytest.approx(b, rel=1e-8)


def test_t_draws_moments(rng):
    d = random_design(rng, 12, 4, signal=[1.0, -1.0])
    fit = fit_model(d, (0, 1, 3))
    count = 200_000
    B = sample_beta_t(fit, 12, rng, count)
    nu = 12 - 3
    cov = fit.rss / nu * np.linalg.inv(fit.chol @ fit.chol.T) * nu / (nu - 2)
    se = np.sqrt(np.diag(cov) / count)
    assert np.all(np.abs(B.mean(axis=0) - fit.beta_hat) < 4 * se)
    emp = np.cov(B, rowvar=False)
    assert np.all(np.abs(emp - cov) <= 0.05 * np.sqrt(np.outer(np.diag(cov), np.diag(cov))))
    np.testing.assert_allclose(np.diag(emp), np.diag(cov), rtol=0.05)


def test_t_draws_collapse_with_zero_rss(rng):
    d = random_design(rng, 10, 3)
    fit = fit_model(d, (0, 1))
    zero = type(fit)(**{**fit.__dict__, "rss": 0.0})
    B = sample_beta_t(zero, 10, rng, 100)
    np.testing.assert_array_equal(B, np.broadcast_to(fit.beta_hat, B.shape))


def test_e_h_zero_epsilon(rng):
    d = random_design(rng, 15, 4)
    fit = fit_model(d, (0, 1))
    s = estimate_e_h(d, fit, 0.0, 50, rng)
    assert s.e_h_hat == 1.0
    assert s.log_score == pytest.approx(s.log_base)


def test_e_h_rank_deficient_or_oversized(rng):
    d = standardize(rng.standard_normal(4), rng.standard_normal((4, 6)))
    s = estimate_e_h(d, None, 1.0, 10, rng)
    assert s.e_h_hat == 0.0 and s.log_score == -math.inf


def test_e_h_true_model_well_separated():
    rng = np.random.default_rng(2)
    d = random_design(rng, 40, 6, signal=[3.0, -3.0, 2.5], noise=0.5)
    fit = fit_model(d, (0, 1, 2))
    eps = default_epsilon(fit, d.n, d.p, 1)
    s = estimate_e_h(d, fit, eps, 100, np.random.default_rng(0))
    big = estimate_e_h(d, fit, eps, 10_000, np.random.default_rng(1))
    assert big.e_h_hat > 0.95
    se = math.sqrt(big.e_h_hat * (1 - big.e_h_hat) / 100) + 1e-3
    assert abs(s.e_h_hat - big.e_h_hat) < 4 * se + 0.02
    assert (s.e_h_hat * 100) == int(s.e_h_hat * 100)


def test_e_h_unbiased_average():
    rng = np.random.default_rng(4)
    d = random_design(rng, 20, 5, signal=[1.0, 0.6], noise=1.0)
    fit = fit_model(d, (0, 1))
    eps = default_epsilon(fit, d.n, d.p, 1)
    ref = estimate_e_h(d, fit, eps, 50_000, np.random.default_rng(99)).e_h_hat
    assert 0.05 < ref < 0.95
    gen = np.random.default_rng(100)
    avg = np.mean([estimate_e_h(d, fit, eps, 100, gen).e_h_hat for _ in range(500)])
    se = math.sqrt(ref * (1 - ref) / 50_000 + ref * (1 - ref) / 50_000)
    assert abs(avg - ref) < 3 * se


def test_e_h_reproducible(rng):
    d = random_design(rng, 20, 5, signal=[1.0, 0.6])
    fit = fit_model(d, (0, 1))
    eps = default_epsilon(fit, d.n, d.p, 1)
    a = estimate_e_h(d, fit, eps, 200, np.random.default_rng(5))
    b = estimate_e_h(d, fit, eps, 200, np.random.default_rng(5))
    assert a == b
