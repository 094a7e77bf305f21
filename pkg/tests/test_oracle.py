import itertools

import numpy as np
import pytest

from gfiselect.design import fit_model, standardize
from gfiselect.experiments import Setup2Config, generate_setup2
from gfiselect.fiducial import sample_beta_t
from gfiselect.oracle import brute_force_l0, enumerate_posterior, exact_min_objectives

from conftest import orthonormal_design, random_design


def test_brute_force_exact_representation(rng):
    d = random_design(rng, 15, 6)
    target = d.X[:, [1, 4]] @ np.array([2.0, -1.0])
    val, S = brute_force_l0(d, target, 2)
    assert val == pytest.approx(0.0, abs=1e-18)
    assert S == (1, 4)


def test_brute_force_kappa_zero(rng):
    d = random_design(rng, 10, 4)
    t = rng.standard_normal(10)
    val, S = brute_force_l0(d, t, 0)
    assert S == ()
    assert val == pytest.approx(0.5 * np.sum((d.X.T @ t) ** 2))


def test_brute_force_matches_explicit_enumeration(rng):
    d = random_design(rng, 12, 5)
    t = rng.standard_normal(12)
    best = np.inf
    for S in itertools.combinations(range(5), 2):
        A = d.gram[:, S]
        b, *_ = np.linalg.lstsq(A, d.X.T @ t, rcond=None)
        r = d.X.T @ t - A @ b
        best = min(best, 0.5 * r @ r)
    assert brute_force_l0(d, t, 2)[0] == pytest.approx(best, rel=1e-10)


def test_brute_force_permutation_invariant(rng):
    X, y = rng.standard_normal((14, 6)), rng.standard_normal(14)
    perm = rng.permutation(6)
    d1, d2 = standardize(y, X), standardize(y, X[:, perm])
    t = rng.standard_normal(14)
    v1, S1 = brute_force_l0(d1, t, 3)
    v2, S2 = brute_force_l0(d2, t, 3)
    assert v1 == pytest.approx(v2, rel=1e-10)
    assert sorted(perm[list(S2)].tolist()) == list(S1)


def test_exact_objectives_agree_with_brute_force(rng):
    d = random_design(rng, 18, 6, signal=[1.0, 1.0])
    M = (0, 2, 5)
    draws = sample_beta_t(fit_model(d, M), d.n, rng, 40)
    fast = exact_min_objectives(d, M, draws)
    for b, v in zip(draws, fast):
        assert v == pytest.approx(brute_force_l0(d, d.X[:, M] @ b, 2)[0], rel=1e-7, abs=1e-10)


def test_enumeration_guards(rng):
    d = random_design(rng, 30, 16)
    with pytest.raises(ValueError):
        enumerate_posterior(d, 1, 2, 1000, rng)
    with pytest.raises(ValueError):
        enumerate_posterior(random_design(rng, 20, 4), 1, 2, 999, rng)


def test_single_covariate_has_probability_one(rng):
    d = standardize(rng.standard_normal(15), rng.standard_normal((15, 1)))
    post = enumerate_posterior(d, 1, 1, 1000, rng)
    assert post.probs() == {(0,): 1.0}


def test_orthogonal_pair_symmetry(rng):
    Q = orthonormal_design(rng, 20, 2).X
    y = Q @ np.array([3.0, 3.0]) + 0.5 * rng.standard_normal(20)
    y -= Q @ (Q.T @ y) - 3.0 * Q.sum(axis=1)
    d = standardize(y, Q)
    post = enumerate_posterior(d, 1, 2, 5000, np.random.default_rng(0)).probs()
    assert post[(0,)] == pytest.approx(post[(1,)], rel=0.05)
    assert sum(post.values()) == pytest.approx(1.0, abs=1e-12)


def test_setup2_top_model_is_small():
    rng = np.random.default_rng(12)
    sizes = []
    for _ in range(5):
        d = generate_setup2(Setup2Config(), rng).train
        sizes.append(len(enumerate_posterior(d, 2, 5, 1000, rng).map_model()))
    assert np.median(sizes) in (3, 4)
