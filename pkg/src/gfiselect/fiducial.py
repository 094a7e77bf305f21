"""Unnormalized generalized fiducial mass of a covariate subset.

    r(M | y)  ∝  pi^{|M|/2} Gamma((n - |M|)/2) RSS_M^{-(n - |M| - 1)/2} E[h(beta_M)]

with the expectation over the multivariate t law
``t_{n-|M|}(beta_hat_M, RSS_M/(n-|M|) (X_M'X_M)^{-1})``, estimated by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .design import ModelFit, RankDeficient, StandardizedDesign, fit_model
from .l0 import L0Config, admissible_batch

# RSS below this fraction of ||y||^2 is treated as exact interpolation.
RSS_REL_TOL = 1e-12


class Degenerate(ValueError):
    """The analytic factor of the fiducial mass is undefined for this model."""


@dataclass(frozen=True)
class ModelScore:
    log_base: float
    e_h_hat: float
    n_importance: int
    log_score: float


def log_base_score(fit: ModelFit, n: int, y_sq_norm: float | None = None) -> float:
    """Log of ``pi^{|M|/2} Gamma((n-|M|)/2) RSS^{-(n-|M|-1)/2}``."""
    k = fit.size
    if k >= n - 1:
        raise Degenerate(f"|M| = {k} must be < n - 1 = {n - 1}")
    floor = RSS_REL_TOL * y_sq_norm if y_sq_norm else 0.0
    if fit.rss <= max(floor, 0.0):
        raise Degenerate("RSS_M = 0: the model interpolates y")
    return 0.5 * k * math.log(math.pi) + math.lgamma(0.5 * (n - k)) - 0.5 * (n - k - 1) * math.log(fit.rss)


def sample_beta_t(fit: ModelFit, n: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` rows from ``t_{n-|M|}(beta_hat, RSS/(n-|M|) (X_M'X_M)^{-1})``."""
    k = fit.size
    nu = n - k
    if nu <= 0:
        raise RankDeficient(f"|M| = {k} leaves no residual degrees of freedom")
    z = rng.standard_normal((count, k))
    v = rng.chisquare(nu, size=count)
    scale = math.sqrt(fit.rss / nu)
    # L^{-T} z has covariance (L L')^{-1} = (X_M'X_M)^{-1}.
    w = linalg.solve_triangular(fit.chol, z.T, lower=True, trans="T", check_finite=False).T
    return fit.beta_hat + (scale / np.sqrt(v / nu))[:, None] * w


def estimate_e_h(
    d: StandardizedDesign,
    fit: ModelFit | None,
    epsilon: float,
    N: int,
    rng: np.random.Generator,
    cfg: L0Config = L0Config(),
    log_base: float | None = None,
) -> ModelScore:
    """Monte Carlo estimate of E[h(beta_M)] from ``N`` fresh t draws, with the combined log score.

    ``fit = None`` stands for a rank-deficient subset, whose estimate is 0.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if fit is None or fit.size > d.n:
        return ModelScore(-math.inf if log_base is None else log_base, 0.0, N, -math.inf)
    if log_base is None:
        log_base = log_base_score(fit, d.n, float(d.y @ d.y))
    if epsilon <= 0:
        e_h = 1.0
    else:
        draws = sample_beta_t(fit, d.n, rng, N)
        e_h = int(np.count_nonzero(admissible_batch(d, fit.model, draws, epsilon, cfg))) / N
    log_score = log_base + math.log(e_h) if e_h > 0 else -math.inf
    return ModelScore(log_base, e_h, N, log_score)


def score_model(d: StandardizedDesign, M, epsilon: float, N: int, rng, cfg: L0Config = L0Config()) -> ModelScore:
    """Convenience wrapper: fit ``M`` then call :func:`estimate_e_h`."""
    try:
        fit = fit_model(d, M)
    except RankDeficient:
        fit = None
    return estimate_e_h(d, fit, epsilon, N, rng, cfg)
