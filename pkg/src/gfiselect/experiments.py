"""Synthetic simulation setups and per-replicate metrics.

Setup 1: rows of X drawn from N_p(0, Sigma) with equicorrelation ``rho``, an
eight-covariate true model and unit noise. Setup 2: nine covariates of which six
are noisy linear combinations of the first three, all true coefficients 1,
``n = 30``.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .design import ModelIndex, StandardizedDesign, fit_model, standardize
from .enet import ElasticNetConfig, elastic_net_weights
from .l0 import L0Config
from .sampler import ChainConfig, PosteriorSummary, run_chain
from .tuning import CvConfig, CvResult, select_p_o

SETUP1_BETA0 = (-1.5, -1.0, -0.8, -0.6, 0.6, 0.8, 1.0, 1.5)

# Setup 2: (coefficients on x1, x2, x3) for x4..x9.
SETUP2_LOADINGS = np.array(
    [
        [0.25, 0.0, 0.0],
        [0.0, 0.5, 0.0],
        [0.0, 0.0, -0.75],
        [1.0, 0.0, 1.0],
        [0.0, 1.0, -1.0],
        [1.0, 1.0, 1.0],
    ]
)


@dataclass(frozen=True)
class Setup1Config:
    n: int = 100
    p: int = 100
    rho: float = 0.0
    beta0: tuple[float, ...] = SETUP1_BETA0
    sigma0: float = 1.0
    n_test: int = 100
    replicates: int = 50
    seed: int = 0

    def __post_init__(self):
        if len(self.beta0) != 8:
            raise ValueError("setup 1 uses eight true coefficients")
        if not 0 <= self.rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        if self.p < len(self.beta0):
            raise ValueError("p must be at least the true model size")


@dataclass(frozen=True)
class Setup2Config:
    n: int = 30
    noise_sd: float = 0.1
    sigma0: float = 1.0
    n_test: int = 30
    replicates: int = 200
    seed: int = 0


@dataclass
class SimData:
    train: StandardizedDesign
    X_test: np.ndarray  # standardized with the training column norms
    y_test: np.ndarray
    true_model: ModelIndex
    beta0: np.ndarray  # raw-scale true coefficients on true_model
    X_raw: np.ndarray
    y_raw: np.ndarray


def _setup1_rows(rng, m: int, p: int, rho: float) -> np.ndarray:
    # Equicorrelated Gaussian rows via one shared factor per row.
    Z = rng.standard_normal((m, p))
    if rho == 0:
        return Z
    return math.sqrt(1 - rho) * Z + math.sqrt(rho) * rng.standard_normal((m, 1))


def generate_setup1(cfg: Setup1Config, rng: np.random.Generator) -> SimData:
    beta0 = np.asarray(cfg.beta0, dtype=float)
    k = beta0.size
    X = _setup1_rows(rng, cfg.n, cfg.p, cfg.rho)
    y = X[:, :k] @ beta0 + cfg.sigma0 * rng.standard_normal(cfg.n)
    Xt = _setup1_rows(rng, cfg.n_test, cfg.p, cfg.rho)
    yt = Xt[:, :k] @ beta0 + cfg.sigma0 * rng.standard_normal(cfg.n_test)
    d = standardize(y, X, center=False)
    return SimData(d, d.transform(Xt), yt, tuple(range(k)), beta0, X, y)


def _setup2_covariates(rng, m: int, noise_sd: float) -> np.ndarray:
    base = rng.standard_normal((m, 3))
    dep = base @ SETUP2_LOADINGS.T + noise_sd * rng.standard_normal((m, 6))
    return np.hstack([base, dep])


def generate_setup2(cfg: Setup2Config, rng: np.random.Generator) -> SimData:
    X = _setup2_covariates(rng, cfg.n, cfg.noise_sd)
    y = X.sum(axis=1) + cfg.sigma0 * rng.standard_normal(cfg.n)
    Xt = _setup2_covariates(rng, cfg.n_test, cfg.noise_sd)
    yt = Xt.sum(axis=1) + cfg.sigma0 * rng.standard_normal(cfg.n_test)
    d = standardize(y, X, center=False)
    return SimData(d, d.transform(Xt), yt, tuple(range(9)), np.ones(9), X, y)


@dataclass(frozen=True)
class MethodConfig:
    """Settings of one full selection run: weights, optional CV for p_o, main chain."""

    steps: int = 15000
    burn_in: int = 5000
    n_importance: int = 100
    p_o: int | None = None  # None: choose by cross-validation
    max_size: int | None = None
    cv: CvConfig = CvConfig()
    enet: ElasticNetConfig = ElasticNetConfig()
    l0: L0Config = L0Config()


@dataclass
class ReplicateMetrics:
    r_map: float
    correct_selection: bool
    map_size: int
    rmse_test: float
    r_true: float
    p_o: int
    map_model: ModelIndex


@dataclass
class ReplicateResult:
    replicate: int
    seed: int
    metrics: ReplicateMetrics
    summary: PosteriorSummary
    cv: CvResult | None = field(default=None, repr=False)


def evaluate_replicate(summary: PosteriorSummary, data: SimData, p_o: int) -> ReplicateMetrics:
    """MAP-model metrics; RMSE uses the MAP least-squares fit on the training data."""
    M = summary.map_model
    r = summary.r_hat
    beta = fit_model(data.train, M).beta_hat
    resid = data.y_test - data.X_test[:, list(M)] @ beta
    return ReplicateMetrics(
        r_map=r[M],
        correct_selection=set(M) == set(data.true_model),
        map_size=len(M),
        rmse_test=float(np.sqrt(np.mean(resid**2))),
        r_true=r.get(tuple(data.true_model), 0.0),
        p_o=p_o,
        map_model=M,
    )


def select(d: StandardizedDesign, method: MethodConfig, seed: int):
    """Weights, p_o (fixed or cross-validated) and the main chain for one dataset.

    Returns ``(chain_result, p_o, cv_result_or_None, weights)``.
    """
    ss = np.random.SeedSequence(seed)
    s_enet, s_cv, s_chain = (int(s.generate_state(1)[0]) for s in ss.spawn(3))
    enet_cfg = ElasticNetConfig(**{**asdict(method.enet), "seed": s_enet})
    weights = elastic_net_weights(d, enet_cfg)
    cv = None
    if method.p_o is None:
        cv_cfg = CvConfig(**{**_shallow(method.cv), "seed": s_cv})
        cv = select_p_o(d, weights, cv_cfg)
        p_o = cv.p_o_star
    else:
        p_o = method.p_o
    chain_cfg = ChainConfig(
        steps=method.steps,
        burn_in=method.burn_in,
        n_importance=method.n_importance,
        p_o=p_o,
        max_size=method.max_size,
        seed=s_chain,
        l0=method.l0,
    )
    return run_chain(d, weights, chain_cfg), p_o, cv, weights


def _shallow(obj) -> dict:
    return {f: getattr(obj, f) for f in obj.__dataclass_fields__}


def replicate_seeds(seed: int, replicates: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(replicates)]


def run_replicate(setup, method: MethodConfig, replicate: int, seed: int) -> ReplicateResult:
    rng = np.random.default_rng(seed)
    gen = generate_setup1 if isinstance(setup, Setup1Config) else generate_setup2
    data = gen(setup, rng)
    chain, p_o, cv, _ = select(data.train, method, seed)
    metrics = evaluate_replicate(chain.summary, data, p_o)
    return ReplicateResult(replicate, seed, metrics, chain.summary, cv)


def _run_one(args):
    return run_replicate(*args)


def run_setup(setup, method: MethodConfig = MethodConfig(), workers: int = 1, progress=None) -> list[ReplicateResult]:
    """All replicates of a setup; output order and values do not depend on ``workers``."""
    jobs = [(setup, method, i, s) for i, s in enumerate(replicate_seeds(setup.seed, setup.replicates))]
    if workers <= 1:
        out = []
        for job in jobs:
            out.append(_run_one(job))
            if progress:
                progress(out[-1])
        return out
    with ProcessPoolExecutor(max_workers=workers) as ex:
        out = list(ex.map(_run_one, jobs))
    return sorted(out, key=lambda r: r.replicate)


def aggregate(results: list[ReplicateResult]) -> dict[str, float]:
    m = [r.metrics for r in results]
    return {
        "replicates": len(m),
        "mean_map_size": float(np.mean([x.map_size for x in m])),
        "mean_rmse": float(np.mean([x.rmse_test for x in m])),
        "mean_r_map": float(np.mean([x.r_map for x in m])),
        "prop_correct": float(np.mean([x.correct_selection for x in m])),
        "mean_r_true": float(np.mean([x.r_true for x in m])),
    }


RECORD_FIELDS = [
    "setup", "p", "rho", "seed", "replicate", "p_o", "map_size", "r_map",
    "correct_selection", "rmse_test", "r_true", "map_model",
]


def records(setup, results: list[ReplicateResult]) -> list[dict]:
    name = "setup1" if isinstance(setup, Setup1Config) else "setup2"
    p = setup.p if isinstance(setup, Setup1Config) else 9
    rho = setup.rho if isinstance(setup, Setup1Config) else ""
    rows = []
    for r in results:
        m = r.metrics
        rows.append(
            {
                "setup": name, "p": p, "rho": rho, "seed": r.seed, "replicate": r.replicate,
                "p_o": m.p_o, "map_size": m.map_size, "r_map": m.r_map,
                "correct_selection": int(m.correct_selection), "rmse_test": m.rmse_test,
                "r_true": m.r_true, "map_model": " ".join(map(str, m.map_model)),
            }
        )
    return rows


def write_records(path, rows: list[dict]) -> None:
    """Write one CSV row per replicate (temp file + rename)."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=RECORD_FIELDS)
            w.writeheader()
            w.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
