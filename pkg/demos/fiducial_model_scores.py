"""
Scoring single models
=====================

The log score of a subset adds an analytic term in the residual sum of
squares to the log of a Monte Carlo admissibility rate under the
multivariate t law centred at the least squares fit.
"""

import numpy as np

from gfiselect import default_epsilon, fit_model, log_base_score, sample_beta_t, score_model, standardize

rng = np.random.default_rng(1)
n, p = 30, 6
X = rng.standard_normal((n, p))
y = 2.0 * X[:, 0] - 1.5 * X[:, 3] + rng.standard_normal(n)
d = standardize(y, X)

#%%
# Draws from the t law scatter around the least squares fit.
fit = fit_model(d, (0, 3))
draws = sample_beta_t(fit, d.n, rng, 5000)
print("beta_hat", fit.beta_hat)
print("draw mean", draws.mean(axis=0))

#%%
# Compare the true subset, a subset with a spurious extra column and one
# missing a signal column.
for M in [(0, 3), (0, 3, 5), (0,)]:
    fit = fit_model(d, M)
    eps = default_epsilon(fit, d.n, d.p, p_o=1)
    s = score_model(d, M, eps, 200, rng)
    print(f"{M!s:12} log_base {log_base_score(fit, d.n):9.3f}  E[h] {s.e_h_hat:.3f}  log score {s.log_score:9.3f}")
