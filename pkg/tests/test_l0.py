import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gfiselect.design import fit_model, standardize
from gfiselect.experiments import Setup2Config, generate_setup2
from gfiselect.l0 import L0Config, default_epsilon, eval_h, l0_min_upper_bound, warm_start
from gfiselect.oracle import brute_force_l0

from conftest import random_design

# 2 * (100^0.51/9 + 2 * log(100 pi)^1.1 / 9 - 1), evaluated with mpmath at 40 digits.
EPS_REFERENCE = 3.370946445614235943786990295796845431839


class _Fit:
    def __init__(self, size, lam, s2):
        self.size, self.lambda_M, self.sigma2_hat = size, lam, s2


def test_default_epsilon_reference_value():
    assert default_epsilon(_Fit(2, 2.0, 1.0), 100, 100, 1) == pytest.approx(EPS_REFERENCE, rel=1e-13)


def test_default_epsilon_clamps():
    assert default_epsilon(_Fit(2, 2.0, 1.0), 100, 100, 100) == 0.0
    assert default_epsilon(_Fit(2, 0.0, 1.0), 100, 100, 1) == 0.0


def test_default_epsilon_on_real_fit(rng):
    d = random_design(rng, 30, 6, signal=[1.0, 1.0])
    fit = fit_model(d, (0, 1))
    bracket = 30**0.51 / 9 + 2 * math.log(6 * math.pi) ** 1.1 / 9 - 0.5
    assert default_epsilon(fit, 30, 6, 0.5) == pytest.approx(fit.lambda_M * fit.sigma2_hat * bracket)


def test_exact_recovery_single_column(rng):
    d = random_design(rng, 15, 5)
    target = 2.5 * d.X[:, 3]
    warm = np.zeros(5)
    warm[3] = d.X[:, 3] @ target
    res = l0_min_upper_bound(d, target, 1, warm)
    assert res.objective == pytest.approx(0.0, abs=1e-20)
    assert res.b[3] == pytest.approx(2.5)


def test_unconstrained_budget_reaches_zero(rng):
    d = random_design(rng, 20, 6)
    target = rng.standard_normal(20)
    res = l0_min_upper_bound(d, target, 6, np.zeros(6))
    assert res.objective < 1e-12


def test_kappa_zero_is_exact(rng):
    d = random_design(rng, 10, 4)
    t = rng.standard_normal(10)
    res = l0_min_upper_bound(d, t, 0, np.ones(4))
    assert res.iterations == 0
    assert res.objective == pytest.approx(0.5 * np.sum((d.X.T @ t) ** 2))


def test_warm_start_thresholded_on_entry(rng):
    d = random_design(rng, 12, 5)
    res = l0_min_upper_bound(d, rng.standard_normal(12), 2, np.arange(1.0, 6.0), L0Config(max_iters=1, polish=False))
    assert np.count_nonzero(res.b) <= 2


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(500):
        d = random_design(rng, 20, 8)
        M = tuple(sorted(rng.choice(8, 4, replace=False)))
        beta = rng.standard_normal(4) * 2
        target = d.X[:, M] @ beta
        # A positive epsilon below any attainable value disables the early exit.
        bound = eval_h(d, M, beta, 1e-300).objective_bound
        single = l0_min_upper_bound(d, target, 3, warm_start(d, M, beta)).objective
        exact, _ = brute_force_l0(d, target, 3)
        assert single >= bound >= exact - 1e-9 * max(1.0, exact)
        hits += abs(bound - exact) <= 1e-6
    assert hits >= 450


def test_objective_sequence_non_increasing():
    rng = np.random.default_rng(3)
    for polish in (False, True):
        for _ in range(100):
            d = random_design(rng, 15, 7)
            res = l0_min_upper_bound(d, rng.standard_normal(15), 3, rng.standard_normal(7), L0Config(polish=polish))
            h = res.history
            assert np.all(np.diff(h) <= 1e-12 * max(1.0, h[0]))


def test_eval_h_duplicate_columns_inadmissible(rng):
    X = rng.standard_normal((12, 4))
    X[:, 2] = X[:, 0]
    d = standardize(rng.standard_normal(12), X)
    v = eval_h(d, (0, 2), [1.0, 2.0], 0.1)
    assert not v.admissible


def test_eval_h_oversized_model(rng):
    d = standardize(rng.standard_normal(4), rng.standard_normal((4, 6)))
    v = eval_h(d, range(5), np.ones(5), 1.0)
    assert not v.admissible and v.iterations == 0


def test_eval_h_zero_epsilon_always_admissible(rng):
    d = random_design(rng, 10, 4)
    assert eval_h(d, (0, 1), [1e-9, 1.0], 0.0).admissible


def test_eval_h_zero_coefficient_inadmissible(rng):
    d = random_design(rng, 20, 5)
    assert not eval_h(d, (0, 1, 2), [1.0, 0.0, -2.0], 1e-8).admissible


def test_verdict_invariant(rng):
    d = random_design(rng, 20, 6)
    for _ in range(50):
        beta = rng.standard_normal(3)
        v = eval_h(d, (0, 2, 4), beta, float(rng.exponential(0.5)))
        if v.early_exit:
            assert not v.admissible and v.objective_bound < v.epsilon
        else:
            assert v.admissible == (v.objective_bound >= v.epsilon)


def test_setup2_redundant_model_inadmissible():
    rng = np.random.default_rng(5)
    M = (0, 1, 2, 8)
    beta = np.ones(4)
    n_false = 0
    for _ in range(20):
        d = generate_setup2(Setup2Config(), rng).train
        fit = fit_model(d, M)
        eps = default_epsilon(fit, d.n, d.p, 1)
        v = eval_h(d, M, beta, eps, fit)
        exact, _ = brute_force_l0(d, d.X[:, M] @ beta, 3)
        assert v.admissible == (exact >= eps)
        n_false += not v.admissible
    assert n_false >= 18


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_admissibility_monotone_in_epsilon(seed):
    rng = np.random.default_rng(seed)
    d = random_design(rng, 15, 6)
    beta = rng.standard_normal(3)
    fit = fit_model(d, (1, 3, 5))
    verdicts = [eval_h(d, (1, 3, 5), beta, e, fit).admissible for e in np.geomspace(1e-4, 1e2, 25)]
    assert all(a >= b for a, b in zip(verdicts, verdicts[1:]))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(0.1, 10.0))
def test_objective_scales_quadratically(seed, c):
    rng = np.random.default_rng(seed)
    d = random_design(rng, 15, 6)
    M, beta = (0, 2, 4), rng.standard_normal(3)
    t = d.X[:, M] @ beta
    r1 = l0_min_upper_bound(d, t, 2, warm_start(d, M, beta))
    r2 = l0_min_upper_bound(d, c * t, 2, warm_start(d, M, c * beta))
    assert r2.objective == pytest.approx(c * c * r1.objective, rel=1e-8, abs=1e-12)
    e1, _ = brute_force_l0(d, t, 2)
    e2, _ = brute_force_l0(d, c * t, 2)
    assert e2 == pytest.approx(c * c * e1, rel=1e-8, abs=1e-12)
