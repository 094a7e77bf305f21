"""
Chain frequencies against exact enumeration
===========================================

For a handful of covariates every subset can be scored directly, which gives
a reference for the visit frequencies of the pseudo-marginal chain.
"""

import numpy as np

from gfiselect import ChainConfig, elastic_net_weights, run_chain, standardize
from gfiselect.oracle import enumerate_posterior

rng = np.random.default_rng(2024)
n, p = 25, 8
X = rng.standard_normal((n, p))
y = X[:, :3] @ np.array([0.7, -0.5, 0.4]) + rng.standard_normal(n)
d = standardize(y, X)

#%%
# Reference probabilities over all subsets of size at most five.
exact = enumerate_posterior(d, p_o=1, max_size=5, N_ref=20_000, rng=np.random.default_rng(1))
top = sorted(exact.probs().items(), key=lambda kv: -kv[1])[:5]

#%%
# A chain with elastic-net proposal weights.
weights = elastic_net_weights(d)
res = run_chain(d, weights, ChainConfig(steps=30_000, burn_in=3_000, p_o=1, max_size=5, seed=0))
r_hat = res.summary.r_hat
print(f"acceptance rate {res.acceptance_rate:.2f}")
for M, pr in top:
    print(f"{M!s:14} exact {pr:.3f}  chain {r_hat.get(M, 0.0):.3f}")

tv = 0.5 * sum(abs(exact.probs().get(M, 0.0) - r_hat.get(M, 0.0)) for M in set(exact.probs()) | set(r_hat))
print("total variation", round(tv, 4))
print("inclusion probabilities", np.round(res.summary.inclusion_prob, 3))
