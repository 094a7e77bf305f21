"""Grouped independence Metropolis-Hastings over covariate subsets.

The chain state carries the Monte Carlo estimate of E[h(beta_M)] that was drawn
when the state was proposed. A rejected proposal leaves the stored estimate
untouched; it is never refreshed in place. This keeps the chain
pseudo-marginal: its model marginal is exactly r(M | y).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .design import ModelFit, ModelIndex, RankDeficient, StandardizedDesign, fit_model, model_index
from .fiducial import Degenerate, ModelScore, estimate_e_h, log_base_score
from .l0 import L0Config, default_epsilon

log = logging.getLogger(__name__)

ADD, DROP, SWAP = "add", "drop", "swap"


class InitializationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class ProposalWeights:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise ValueError("proposal weights must be a vector of positive finite numbers")
        object.__setattr__(self, "w", w)

    @classmethod
    def uniform(cls, p: int) -> "ProposalWeights":
        return cls(np.ones(p))


class Proposal(NamedTuple):
    model: ModelIndex
    log_q_forward: float
    log_q_backward: float
    move: str


def feasible_moves(size: int, p: int, max_size: int) -> list[str]:
    moves = []
    if size < max_size and size < p:
        moves.append(ADD)
    if size > 1:
        moves.append(DROP)
    if size < p:
        moves.append(SWAP)
    return moves


def _weighted_pick(rng, candidates: np.ndarray, w: np.ndarray) -> tuple[int, float]:
    cw = w[candidates]
    total = cw.sum()
    u = rng.random() * total
    j = int(np.searchsorted(np.cumsum(cw), u, side="right"))
    j = min(j, len(candidates) - 1)
    return int(candidates[j]), math.log(cw[j] / total)


def _complement(M: ModelIndex, p: int) -> np.ndarray:
    mask = np.ones(p, dtype=bool)
    mask[list(M)] = False
    return np.flatnonzero(mask)


def propose(M: ModelIndex, weights: ProposalWeights, rng: np.random.Generator, max_size: int) -> Proposal:
    """Draw a neighbour of ``M`` by weighted ADD, uniform DROP or SWAP.

    The move type is uniform over the moves feasible at ``M``. Insertions pick
    ``j`` outside ``M`` with probability proportional to ``w_j``; removals are
    uniform over ``M``. Both log proposal densities are exact, including the
    feasibility set of the reverse move.
    """
    w = weights.w
    p = w.shape[0]
    k = len(M)
    if not 1 <= k <= max_size:
        raise ValueError(f"model size {k} outside [1, {max_size}]")
    moves = feasible_moves(k, p, max_size)
    if not moves:
        raise ValueError("model space has a single element; nothing to propose")
    move = moves[int(rng.integers(len(moves)))]
    comp = _complement(M, p)

    if move == ADD:
        j, log_pick = _weighted_pick(rng, comp, w)
        new = model_index(M + (j,))
        log_f = -math.log(len(moves)) + log_pick
        log_b = -math.log(len(feasible_moves(k + 1, p, max_size))) - math.log(k + 1)
    elif move == DROP:
        i = M[int(rng.integers(k))]
        new = tuple(m for m in M if m != i)
        log_f = -math.log(len(moves)) - math.log(k)
        new_comp_w = w[comp].sum() + w[i]
        log_b = -math.log(len(feasible_moves(k - 1, p, max_size))) + math.log(w[i] / new_comp_w)
    else:
        i = M[int(rng.integers(k))]
        j, log_pick = _weighted_pick(rng, comp, w)
        new = model_index([m for m in M if m != i] + [j])
        log_f = -math.log(len(moves)) - math.log(k) + log_pick
        new_comp_w = w[comp].sum() - w[j] + w[i]
        log_b = -math.log(len(moves)) - math.log(k) + math.log(w[i] / new_comp_w)
    return Proposal(new, log_f, log_b, move)


def proposal_log_density(M: ModelIndex, M_new: ModelIndex, weights: ProposalWeights, max_size: int) -> float:
    """Exact ``log q(M -> M_new)`` of :func:`propose` (``-inf`` if unreachable)."""
    w = weights.w
    p = w.shape[0]
    k = len(M)
    moves = feasible_moves(k, p, max_size)
    S, T = set(M), set(M_new)
    added, removed = T - S, S - T
    comp_w = w.sum() - w[list(M)].sum()
    if len(added) == 1 and not removed and ADD in moves:
        (j,) = added
        return -math.log(len(moves)) + math.log(w[j] / comp_w)
    if len(removed) == 1 and not added and DROP in moves:
        return -math.log(len(moves)) - math.log(k)
    if len(added) == 1 and len(removed) == 1 and SWAP in moves:
        (j,) = added
        return -math.log(len(moves)) - math.log(k) + math.log(w[j] / comp_w)
    return -math.inf


@dataclass(frozen=True)
class ChainConfig:
    steps: int = 15000
    burn_in: int = 5000
    n_importance: int = 100
    p_o: float = 1
    max_size: int | None = None  # default floor(sqrt(n))
    seed: int | None = 0
    l0: L0Config = L0Config()
    record_trace: bool = False

    def __post_init__(self):
        if not self.steps > self.burn_in >= 0:
            raise ValueError("need steps > burn_in >= 0")
        if self.n_importance < 1:
            raise ValueError("n_importance must be >= 1")
        if self.p_o < 0:
            raise ValueError("p_o must be >= 0")
        if self.max_size is not None and self.max_size < 1:
            raise ValueError("max_size must be >= 1")

    def resolved_max_size(self, n: int, p: int) -> int:
        m = self.max_size if self.max_size is not None else int(math.isqrt(n))
        return max(1, min(m, p))


@dataclass(frozen=True)
class ChainState:
    model: ModelIndex
    score: ModelScore
    fit: ModelFit | None


@dataclass
class PosteriorSummary:
    visit_counts: dict[ModelIndex, int]
    p: int

    @property
    def total(self) -> int:
        return sum(self.visit_counts.values())

    @property
    def r_hat(self) -> dict[ModelIndex, float]:
        t = self.total
        return {M: c / t for M, c in self.visit_counts.items()}

    @property
    def map_model(self) -> ModelIndex:
        # Highest count; ties go to the lexicographically smallest subset.
        return min(self.visit_counts, key=lambda M: (-self.visit_counts[M], M))

    @property
    def inclusion_prob(self) -> np.ndarray:
        out = np.zeros(self.p)
        for M, r in self.r_hat.items():
            out[list(M)] += r
        return out

    def top(self, k: int = 10) -> list[tuple[ModelIndex, float]]:
        r = self.r_hat
        return sorted(r.items(), key=lambda kv: (-kv[1], kv[0]))[:k]

    def merge(self, other: "PosteriorSummary") -> "PosteriorSummary":
        counts = dict(self.visit_counts)
        for M, c in other.visit_counts.items():
            counts[M] = counts.get(M, 0) + c
        return PosteriorSummary(counts, self.p)


class TraceRecord(NamedTuple):
    step: int
    model: ModelIndex
    log_score: float
    accepted: bool


@dataclass
class ChainResult:
    summary: PosteriorSummary
    acceptance_rate: float
    initial: ChainState
    final: ChainState
    trace: list[TraceRecord] = field(default_factory=list)


class _ModelCache:
    """Deterministic per-model quantities: fit, threshold and analytic log factor."""

    def __init__(self, d: StandardizedDesign, p_o: float):
        self.d = d
        self.p_o = p_o
        self.y_sq = float(d.y @ d.y)
        self._cache: dict[ModelIndex, tuple[ModelFit, float, float] | None] = {}

    def get(self, M: ModelIndex):
        try:
            return self._cache[M]
        except KeyError:
            pass
        d = self.d
        entry = None
        try:
            fit = fit_model(d, M)
            lb = log_base_score(fit, d.n, self.y_sq)
            entry = (fit, default_epsilon(fit, d.n, d.p, self.p_o), lb)
        except RankDeficient:
            pass
        except Degenerate as exc:
            log.warning("excluding model %s: %s", M, exc)
        self._cache[M] = entry
        return entry


def _score(cache: _ModelCache, M: ModelIndex, rng, cfg: ChainConfig) -> ChainState:
    entry = cache.get(M)
    if entry is None:
        return ChainState(M, ModelScore(-math.inf, 0.0, cfg.n_importance, -math.inf), None)
    fit, eps, lb = entry
    score = estimate_e_h(cache.d, fit, eps, cfg.n_importance, rng, cfg.l0, log_base=lb)
    return ChainState(M, score, fit)


def _initialize(cache: _ModelCache, weights: ProposalWeights, rng, cfg: ChainConfig, max_size: int) -> ChainState:
    p = weights.w.shape[0]
    order = np.argsort(-weights.w, kind="stable")
    size = int(min(max(round(cfg.p_o), 1), max_size, p))
    single = 0
    tried = []
    for _ in range(p):
        if size > 1:
            M = model_index(order[:size])
        else:
            M = (int(order[single % p]),)
            single += 1
        state = _score(cache, M, rng, cfg)
        tried.append((M, state.score.log_score))
        if state.score.log_score > -math.inf:
            return state
        size = max(size - 1, 1)
    raise InitializationFailed(f"no starting model with positive score after {p} attempts: {tried}")


def mh_step(state: ChainState, cache: _ModelCache, weights: ProposalWeights, rng, cfg: ChainConfig, max_size: int):
    """One GIMH transition; returns ``(state, accepted, proposal)``."""
    prop = propose(state.model, weights, rng, max_size)
    new = _score(cache, prop.model, rng, cfg)
    if new.score.log_score == -math.inf:
        return state, False, prop
    log_alpha = new.score.log_score - state.score.log_score + prop.log_q_backward - prop.log_q_forward
    if log_alpha >= 0 or rng.random() < math.exp(log_alpha):
        return new, True, prop
    return state, False, prop


def run_chain(d: StandardizedDesign, weights: ProposalWeights, cfg: ChainConfig = ChainConfig()) -> ChainResult:
    """Run the pseudo-marginal chain and tally visits after burn-in."""
    if weights.w.shape[0] != d.p:
        raise ValueError("weights must have one entry per covariate")
    rng = np.random.default_rng(cfg.seed)
    max_size = cfg.resolved_max_size(d.n, d.p)
    cache = _ModelCache(d, cfg.p_o)
    state = initial = _initialize(cache, weights, rng, cfg, max_size)

    counts: dict[ModelIndex, int] = {}
    trace: list[TraceRecord] = []
    n_acc = 0
    single_model = d.p == 1
    for step in range(1, cfg.steps + 1):
        if single_model:
            accepted = False
        else:
            state, accepted, _ = mh_step(state, cache, weights, rng, cfg, max_size)
        n_acc += accepted
        if step > cfg.burn_in:
            counts[state.model] = counts.get(state.model, 0) + 1
        if cfg.record_trace:
            trace.append(TraceRecord(step, state.model, state.score.log_score, accepted))
    return ChainResult(PosteriorSummary(counts, d.p), n_acc / cfg.steps, initial, state, trace)
