"""Elastic-net proposal weights for the model-space sampler."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .design import StandardizedDesign
from .sampler import ProposalWeights


@dataclass(frozen=True)
class ElasticNetConfig:
    alpha_mix: float = 0.5
    n_lambda: int = 100
    cv_folds: int = 5
    seed: int | None = 0
    max_sweeps: int = 1000
    tol: float = 1e-8


def lambda_grid(X: np.ndarray, y: np.ndarray, alpha_mix: float, n_lambda: int) -> np.ndarray:
    """Geometric grid from ``max_j |x_j'y| / (n alpha)`` down by a factor 1e-3."""
    n = X.shape[0]
    lam_max = np.max(np.abs(X.T @ y)) / (n * alpha_mix)
    if lam_max <= 0:
        lam_max = 1.0
    return lam_max * np.geomspace(1.0, 1e-3, n_lambda)


def enet_path(X, y, lambdas, alpha_mix: float = 0.5, max_sweeps: int = 1000, tol: float = 1e-8) -> np.ndarray:
    """Coefficients minimizing ``(1/2n)||y - Xb||^2 + lam (alpha |b|_1 + (1-alpha)/2 |b|^2)`` for each lam."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    return _kernels.elastic_net_path(
        X.T @ X, X.T @ y, float(X.shape[0]), np.asarray(lambdas, dtype=float), float(alpha_mix), max_sweeps, tol
    )


def cv_elastic_net(d: StandardizedDesign, cfg: ElasticNetConfig = ElasticNetConfig()) -> tuple[np.ndarray, float]:
    """Fit the elastic net with lambda chosen by K-fold CV on squared prediction error.

    Returns ``(coefficients, lambda)``.
    """
    n = d.n
    if not 2 <= cfg.cv_folds <= n:
        raise ValueError(f"need 2 <= cv_folds <= n, got {cfg.cv_folds}")
    if not 0 < cfg.alpha_mix <= 1:
        raise ValueError("alpha_mix must lie in (0, 1]")
    X, y = d.X, d.y
    lambdas = lambda_grid(X, y, cfg.alpha_mix, cfg.n_lambda)
    perm = np.random.default_rng(cfg.seed).permutation(n)
    mse = np.zeros(len(lambdas))
    for test in np.array_split(perm, cfg.cv_folds):
        train = np.setdiff1d(perm, test)
        coefs = enet_path(X[train], y[train], lambdas, cfg.alpha_mix, cfg.max_sweeps, cfg.tol)
        resid = y[test][:, None] - X[test] @ coefs.T
        mse += np.mean(resid**2, axis=0)
    best = int(np.argmin(mse))
    coefs = enet_path(X, y, lambdas[: best + 1], cfg.alpha_mix, cfg.max_sweeps, cfg.tol)
    return coefs[-1], float(lambdas[best])


def elastic_net_weights(d: StandardizedDesign, cfg: ElasticNetConfig = ElasticNetConfig()) -> ProposalWeights:
    """Squared CV elastic-net coefficients offset by ``n^{-2}``."""
    beta, _ = cv_elastic_net(d, cfg)
    return ProposalWeights(beta**2 + d.n**-2.0)
