"""Variable selection over epsilon-admissible covariate subsets.

A generalized fiducial distribution over subsets of a Gaussian linear model,
restricted by an explicit L0-minimization test and explored with a
pseudo-marginal Metropolis-Hastings chain.
"""

from .design import ModelFit, RankDeficient, StandardizedDesign, delta_m, fit_model, model_index, standardize
from .enet import ElasticNetConfig, elastic_net_weights
from .fiducial import Degenerate, ModelScore, estimate_e_h, log_base_score, sample_beta_t, score_model
from .l0 import AdmissibilityVerdict, L0Config, default_epsilon, eval_h, l0_min_upper_bound, warm_start
from .oracle import brute_force_l0, enumerate_posterior
from .sampler import (
    ChainConfig,
    InitializationFailed,
    PosteriorSummary,
    ProposalWeights,
    propose,
    run_chain,
)
from .tuning import CvConfig, select_p_o

__all__ = [
    "AdmissibilityVerdict", "ChainConfig", "CvConfig", "Degenerate", "ElasticNetConfig",
    "InitializationFailed", "L0Config", "ModelFit", "ModelScore", "PosteriorSummary",
    "ProposalWeights", "RankDeficient", "StandardizedDesign", "brute_force_l0",
    "default_epsilon", "delta_m", "elastic_net_weights", "enumerate_posterior",
    "estimate_e_h", "eval_h", "fit_model", "l0_min_upper_bound", "log_base_score",
    "model_index", "propose", "run_chain", "sample_beta_t", "score_model", "select_p_o", "warm_start",
    "standardize",
]
