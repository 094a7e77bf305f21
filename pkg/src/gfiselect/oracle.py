"""Exhaustive small-p references: exact L0 minima and the enumerated fiducial distribution.

Both routines avoid the hard-thresholding solver entirely and are meant for
checking it and the sampler.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb, logsumexp

from .design import ModelIndex, RankDeficient, StandardizedDesign, fit_model
from .fiducial import Degenerate, log_base_score, sample_beta_t
from .l0 import default_epsilon

MAX_ENUM_P = 15
MAX_SUPPORTS = 10**6


def _check_supports(p: int, kappa: int):
    if not 0 <= kappa <= p:
        raise ValueError(f"kappa must lie in [0, p], got {kappa}")
    if comb(p, kappa, exact=True) > MAX_SUPPORTS:
        raise ValueError(f"C({p}, {kappa}) supports exceed the enumeration guard {MAX_SUPPORTS}")


def brute_force_l0(d: StandardizedDesign, target, kappa: int) -> tuple[float, tuple[int, ...]]:
    """Global minimum of ``1/2 ||X'(target - Xb)||^2`` over ``||b||_0 <= kappa``.

    Every support of size exactly ``kappa`` is solved by least squares on
    ``X'X_S b = X'target``; smaller supports are nested inside these.
    """
    target = np.asarray(target, dtype=float)
    _check_supports(d.p, kappa)
    c = d.X.T @ target
    if kappa == 0:
        return 0.5 * float(c @ c), ()
    G = d.gram
    best, arg = math.inf, ()
    for S in itertools.combinations(range(d.p), kappa):
        GS = G[:, S]
        b, *_ = np.linalg.lstsq(GS, c, rcond=None)
        r = c - GS @ b
        val = 0.5 * float(r @ r)
        if val < best:
            best, arg = val, S
    return best, arg


def min_objective_forms(d: StandardizedDesign, M: ModelIndex) -> np.ndarray:
    """Quadratic forms ``P_S`` with ``min_{supp b = S} objective = 1/2 beta' P_S beta``.

    For ``target = X_M beta`` the minimum over a fixed support ``S`` is
    ``1/2 beta'(G2_MM - G2_MS G2_SS^+ G2_SM) beta`` with ``G2 = (X'X)^2``.
    Returns an array of shape ``(n_supports, |M|, |M|)``.
    """
    M = list(M)
    kappa = len(M) - 1
    _check_supports(d.p, kappa)
    G2 = d.gram2
    base = G2[np.ix_(M, M)]
    if kappa == 0:
        return base[None]
    forms = []
    for S in itertools.combinations(range(d.p), kappa):
        S = list(S)
        A = G2[np.ix_(S, M)]
        forms.append(base - A.T @ np.linalg.pinv(G2[np.ix_(S, S)], rcond=1e-13, hermitian=True) @ A)
    return np.stack(forms)


def exact_min_objectives(d: StandardizedDesign, M: ModelIndex, draws: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Exact ``min_{||b||_0 <= |M|-1} 1/2 ||X'(X_M beta - Xb)||^2`` for each row ``beta`` of ``draws``."""
    P = min_objective_forms(d, M)
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    out = np.empty(draws.shape[0])
    for lo in range(0, draws.shape[0], chunk):
        B = draws[lo : lo + chunk]
        q = np.einsum("ni,sij,nj->ns", B, P, B, optimize=True)
        out[lo : lo + chunk] = 0.5 * q.min(axis=1)
    return np.maximum(out, 0.0)


@dataclass(frozen=True)
class EnumeratedEntry:
    log_base: float
    e_h_ref: float
    prob: float


@dataclass(frozen=True)
class EnumeratedPosterior:
    table: dict[ModelIndex, EnumeratedEntry]
    N_ref: int

    def probs(self) -> dict[ModelIndex, float]:
        return {M: e.prob for M, e in self.table.items()}

    def map_model(self) -> ModelIndex:
        return min(self.table, key=lambda M: (-self.table[M].prob, M))


def enumerate_posterior(
    d: StandardizedDesign, p_o: float, max_size: int, N_ref: int, rng: np.random.Generator
) -> EnumeratedPosterior:
    """Normalized fiducial probabilities of every subset with ``1 <= |M| <= max_size``.

    E[h] is estimated from ``N_ref`` t draws per model with the admissibility
    decision taken on the exact L0 minimum.
    """
    if d.p > MAX_ENUM_P:
        raise ValueError(f"enumeration refused for p = {d.p} > {MAX_ENUM_P}")
    if N_ref < 1000:
        raise ValueError("N_ref must be >= 1000")
    y_sq = float(d.y @ d.y)
    rows = []
    for k in range(1, min(max_size, d.p) + 1):
        for M in itertools.combinations(range(d.p), k):
            try:
                fit = fit_model(d, M)
                lb = log_base_score(fit, d.n, y_sq)
            except (RankDeficient, Degenerate):
                continue
            eps = default_epsilon(fit, d.n, d.p, p_o)
            if eps <= 0:
                e_h = 1.0
            else:
                draws = sample_beta_t(fit, d.n, rng, N_ref)
                e_h = float(np.mean(exact_min_objectives(d, M, draws) >= eps))
            rows.append((M, lb, e_h))
    if not rows:
        raise ValueError("no full-rank model in the enumerated space")
    logw = np.array([lb + math.log(e) if e > 0 else -math.inf for _, lb, e in rows])
    if np.all(np.isneginf(logw)):
        raise ValueError("every enumerated model has zero estimated admissibility")
    probs = np.exp(logw - logsumexp(logw))
    table = {M: EnumeratedEntry(lb, e, float(pr)) for (M, lb, e), pr in zip(rows, probs)}
    return EnumeratedPosterior(table, N_ref)
