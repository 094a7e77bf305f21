"""Cross-validated choice of the prior model-size parameter ``p_o``."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .design import StandardizedDesign, fit_model, standardize
from .l0 import L0Config
from .sampler import ChainConfig, InitializationFailed, ProposalWeights, run_chain

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CvConfig:
    folds: int = 10
    p_o_grid: tuple[int, ...] = tuple(range(1, 11))
    cv_steps: int = 200
    cv_burn_in: int = 100
    cv_N: int = 30
    seed: int | None = 0
    max_size: int | None = None
    l0: L0Config = L0Config()

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if not self.cv_steps > self.cv_burn_in >= 0:
            raise ValueError("need cv_steps > cv_burn_in >= 0")
        if not self.p_o_grid or min(self.p_o_grid) < 0:
            raise ValueError("p_o grid must be nonempty with entries >= 0")
        if self.cv_N < 1:
            raise ValueError("cv_N must be >= 1")


@dataclass
class CvResult:
    p_o_star: int
    bic_table: np.ndarray  # (len(grid), folds), NaN where a chain failed to start
    grid: tuple[int, ...] = field(default_factory=tuple)

    @property
    def mean_bic(self) -> np.ndarray:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return np.nanmean(self.bic_table, axis=1)


def fold_partition(n: int, folds: int, seed) -> list[np.ndarray]:
    """Shuffle rows once with ``seed`` and cut them into near-equal contiguous folds."""
    if not 2 <= folds <= n:
        raise ValueError(f"need 2 <= folds <= n, got folds={folds}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, folds)]


def heldout_bic(rss: float, n_test: int, size: int) -> float:
    return n_test * math.log(rss / n_test) + size * math.log(n_test)


def _cell_seed(seed, p_o: int, f: int) -> int:
    # Keyed by (p_o, fold) values so cells do not depend on grid order.
    base = 0 if seed is None else int(seed)
    return int(np.random.SeedSequence([base, p_o, f]).generate_state(1)[0])


def select_p_o(d: StandardizedDesign, weights: ProposalWeights, cfg: CvConfig = CvConfig()) -> CvResult:
    """Pick ``p_o`` minimizing the fold-averaged held-out BIC of the chain's MAP model.

    Each training fold is re-standardized on its own rows; the held-out rows get
    the training centering and scaling. Ties go to the smallest ``p_o``.
    """
    grid = tuple(int(g) for g in cfg.p_o_grid)
    if len(grid) == 1:
        return CvResult(grid[0], np.full((1, cfg.folds), np.nan), grid)
    parts = fold_partition(d.n, cfg.folds, cfg.seed)
    table = np.full((len(grid), cfg.folds), np.nan)
    for f, test in enumerate(parts):
        train = np.setdiff1d(np.arange(d.n), test)
        d_tr = standardize(d.y[train], d.X[train], center=d.centered)
        X_te, y_te = d_tr.transform(d.X[test], d.y[test])
        for i, p_o in enumerate(grid):
            chain_cfg = ChainConfig(
                steps=cfg.cv_steps,
                burn_in=cfg.cv_burn_in,
                n_importance=cfg.cv_N,
                p_o=p_o,
                max_size=cfg.max_size,
                seed=_cell_seed(cfg.seed, p_o, f),
                l0=cfg.l0,
            )
            try:
                res = run_chain(d_tr, weights, chain_cfg)
            except InitializationFailed as exc:
                log.warning("CV cell p_o=%s fold=%d skipped: %s", p_o, f, exc)
                continue
            M = res.summary.map_model
            beta = fit_model(d_tr, M).beta_hat
            r = y_te - X_te[:, list(M)] @ beta
            table[i, f] = heldout_bic(max(float(r @ r), 1e-300), len(test), len(M))
    result = CvResult(grid[0], table, grid)
    means = result.mean_bic
    if np.all(np.isnan(means)):
        raise InitializationFailed("every cross-validation chain failed to initialize")
    best = np.nanmin(means)
    result.p_o_star = min(g for g, m in zip(grid, means) if m == best)
    return result
