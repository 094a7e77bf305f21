"""Epsilon-admissibility of a coefficient vector via explicit L0 minimization.

A coefficient vector ``beta_M`` on a subset ``M`` is epsilon-admissible when no
vector ``b`` with at most ``|M| - 1`` nonzeros brings
``1/2 ||X'(X_M beta_M - X b)||^2`` below ``epsilon``. The minimum is bounded
from above by iterative hard thresholding (projected gradient descent onto the
sparsity constraint), so an "inadmissible" verdict is always backed by an
achieved objective value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .design import ModelFit, RankDeficient, StandardizedDesign, fit_model, model_index


@dataclass(frozen=True)
class L0Config:
    """Stopping and refinement controls for the hard-thresholding solver.

    ``lipschitz = 0`` means use the design's cached constant. ``multi_start``
    makes :func:`eval_h` follow the standard warm start (smallest entry of
    ``beta_M`` dropped) with the other leave-one-out starts, keeping the best
    achieved objective.
    """

    max_iters: int = 1000
    rel_tol: float = 1e-7
    lipschitz: float = 0.0
    polish: bool = True
    multi_start: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.lipschitz < 0:
            raise ValueError("lipschitz must be >= 0")

    def step_constant(self, d: StandardizedDesign) -> float:
        return self.lipschitz if self.lipschitz > 0 else d.lipschitz


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    objective_bound: float
    epsilon: float
    iterations: int
    early_exit: bool


@dataclass(frozen=True)
class L0Result:
    """Outcome of one run of the hard-thresholding solver."""

    objective: float
    b: np.ndarray
    iterations: int
    early_exit: bool
    history: np.ndarray


def default_epsilon(fit: ModelFit, n: int, p: int, p_o: float) -> float:
    """Default admissibility threshold for a fitted model.

    ``Lambda_M * sigma2_M * (n^0.51/9 + |M| log(p pi)^1.1 / 9 - p_o)_+``
    """
    k = fit.size
    if n <= k:
        raise ValueError(f"need n > |M|, got n={n}, |M|={k}")
    if p < 1:
        raise ValueError("p must be >= 1")
    if p_o < 0:
        raise ValueError("p_o must be >= 0")
    bracket = n**0.51 / 9.0 + k * math.log(p * math.pi) ** 1.1 / 9.0 - p_o
    return fit.lambda_M * fit.sigma2_hat * max(bracket, 0.0)


def l0_min_upper_bound(
    d: StandardizedDesign,
    target,
    kappa: int,
    warm=None,
    cfg: L0Config = L0Config(),
    epsilon: float = 0.0,
) -> L0Result:
    """Minimize ``1/2 ||X'(target - Xb)||^2`` subject to ``||b||_0 <= kappa``.

    Iterates ``b <- T_kappa(b - grad/l)`` from ``warm`` (hard-thresholded to
    ``kappa`` entries first; lowest index wins ties). Whenever an iteration
    leaves the support unchanged the iterate is replaced by the least-squares
    solution on that support, if ``cfg.polish``. Stops early once the
    objective drops below ``epsilon``.

    The returned objective is achieved by the returned ``b``, so it is an
    upper bound on the constrained minimum.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (d.n,):
        raise ValueError("target must have length n")
    if not 0 <= kappa <= d.p:
        raise ValueError(f"kappa must lie in [0, p], got {kappa}")
    b0 = np.zeros(d.p) if warm is None else np.asarray(warm, dtype=float)
    if b0.shape != (d.p,):
        raise ValueError("warm start must have length p")
    c = d.X.T @ target
    Gc = d.gram @ c
    history = np.empty(2 * cfg.max_iters + 3)
    obj, it, early, b, nh = _kernels.iht(
        d.gram,
        d.gram2,
        c,
        Gc,
        int(kappa),
        b0,
        cfg.step_constant(d),
        cfg.max_iters,
        cfg.rel_tol,
        float(epsilon),
        cfg.polish,
        history,
    )
    return L0Result(objective=float(obj), b=b, iterations=int(it), early_exit=bool(early), history=history[:nh].copy())


def warm_start(d: StandardizedDesign, M: Sequence[int], beta_M, drop: int | None = None) -> np.ndarray:
    """``beta_M`` embedded in R^p with entry ``drop`` (default: smallest magnitude) removed."""
    beta_M = np.asarray(beta_M, dtype=float)
    b0 = np.zeros(d.p)
    b0[list(M)] = beta_M
    if drop is None:
        drop = int(np.argmin(np.abs(beta_M)))
    b0[M[drop]] = 0.0
    return b0


def eval_h(
    d: StandardizedDesign,
    M: Sequence[int],
    beta_M,
    epsilon: float,
    fit: ModelFit | None = None,
    cfg: L0Config = L0Config(),
) -> AdmissibilityVerdict:
    """Indicator that ``beta_M`` is epsilon-admissible on the subset ``M``."""
    M = model_index(M, d.p)
    beta_M = np.asarray(beta_M, dtype=float)
    if beta_M.shape != (len(M),):
        raise ValueError("beta_M must have one entry per covariate in M")
    if len(M) > d.n:
        return AdmissibilityVerdict(False, 0.0, epsilon, 0, False)
    if fit is None:
        try:
            fit = fit_model(d, M)
        except RankDeficient:
            return AdmissibilityVerdict(False, 0.0, epsilon, 0, False)
    elif fit.model != M:
        raise ValueError("fit does not correspond to M")
    if epsilon <= 0:
        return AdmissibilityVerdict(True, math.inf, epsilon, 0, False)

    target = d.X[:, list(M)] @ beta_M
    starts = np.argsort(np.abs(beta_M), kind="stable")
    if not cfg.multi_start or len(M) == 1:
        starts = starts[:1]
    best, iters = None, 0
    for drop in starts:
        res = l0_min_upper_bound(d, target, len(M) - 1, warm_start(d, M, beta_M, int(drop)), cfg, epsilon)
        iters += res.iterations
        if best is None or res.objective < best.objective:
            best = res
        if res.early_exit:
            return AdmissibilityVerdict(False, res.objective, epsilon, iters, True)
    admissible = best.objective >= epsilon
    return AdmissibilityVerdict(admissible, best.objective, epsilon, iters, False)


def admissible_batch(
    d: StandardizedDesign, M: Sequence[int], draws: np.ndarray, epsilon: float, cfg: L0Config = L0Config()
) -> np.ndarray:
    """Vectorized :func:`eval_h` over the rows of ``draws``; ``M`` must be full rank."""
    draws = np.ascontiguousarray(draws, dtype=float)
    if epsilon <= 0:
        return np.ones(draws.shape[0], dtype=bool)
    objs, _, early = _kernels.admissibility_batch(
        d.gram,
        d.gram2,
        np.asarray(M, dtype=np.int64),
        draws,
        cfg.step_constant(d),
        cfg.max_iters,
        cfg.rel_tol,
        float(epsilon),
        cfg.polish,
        cfg.multi_start,
    )
    return ~early & (objs >= epsilon)
