"""
Admissible and redundant coefficient vectors
============================================

A coefficient vector on a subset of columns is admissible when no vector with
one fewer nonzero entry predicts nearly as well. This walk-through builds a
design where one column is almost the sum of two others and checks a few
candidate vectors.
"""

import numpy as np

from gfiselect import L0Config, default_epsilon, eval_h, fit_model, l0_min_upper_bound, standardize, warm_start
from gfiselect.oracle import brute_force_l0

rng = np.random.default_rng(0)
n = 40
X = rng.standard_normal((n, 5))
X[:, 4] = X[:, 0] + X[:, 1] + 0.05 * rng.standard_normal(n)
y = X[:, 0] - X[:, 2] + rng.standard_normal(n)
d = standardize(y, X)

#%%
# The threshold grows with the subset size and shrinks with ``p_o``.
for M in [(0, 2), (0, 1, 2), (0, 1, 2, 4)]:
    fit = fit_model(d, M)
    print(M, "eps =", round(default_epsilon(fit, d.n, d.p, p_o=1), 3))

#%%
# Columns 0, 1 and 4 carry the same information twice over, so the least
# squares coefficients on that subset can be matched by a two-column vector.
M = (0, 1, 4)
fit = fit_model(d, M)
eps = default_epsilon(fit, d.n, d.p, p_o=1)
verdict = eval_h(d, M, fit.beta_hat, eps, fit)
print(verdict)

#%%
# A non-redundant subset passes.
M = (0, 2)
fit = fit_model(d, M)
print(eval_h(d, M, fit.beta_hat, default_epsilon(fit, d.n, d.p, 1), fit))

#%%
# The hard-thresholding solver returns an achieved value, so it never
# undercuts the exhaustive minimum. On small problems the two usually agree.
target = d.X[:, [0, 1, 4]] @ np.array([1.0, 0.5, 0.8])
res = l0_min_upper_bound(d, target, 2, warm_start(d, (0, 1, 4), [1.0, 0.5, 0.8]), L0Config())
exact, support = brute_force_l0(d, target, 2)
print("solver", res.objective, "exhaustive", exact, "on", support)
