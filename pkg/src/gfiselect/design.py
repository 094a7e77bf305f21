"""Standardized designs, model subsets and per-model least-squares fits."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

# Minimum Cholesky pivot (squared diagonal of the factor) before a column
# subset is declared linearly dependent. Columns have unit norm, so the pivot
# is the squared sine of the angle between a column and the span of the
# preceding ones.
PIVOT_TOL = 1e-10

ModelIndex = tuple[int, ...]


class RankDeficient(ValueError):
    """Raised when X_M does not have full column rank."""


def model_index(indices: Iterable[int], p: int | None = None) -> ModelIndex:
    """Canonical (sorted, duplicate-free) form of a covariate subset."""
    out = tuple(sorted(int(i) for i in indices))
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate covariate in model {out}")
    if out and out[0] < 0:
        raise ValueError(f"negative covariate index in model {out}")
    if p is not None and out and out[-1] >= p:
        raise ValueError(f"covariate index {out[-1]} out of range for p={p}")
    return out


@dataclass(frozen=True, eq=False)
class StandardizedDesign:
    """Response and design matrix with unit-norm columns.

    Attributes
    ----------
    y : ndarray, shape (n,)
        Response, mean-centered when ``centered`` is set.
    X : ndarray, shape (n, p)
        Design with every column scaled to unit L2 norm.
    col_norms : ndarray, shape (p,)
        Norms of the (possibly centered) raw columns, so that a coefficient
        ``b`` on the standardized scale equals ``b / col_norms`` on the raw one.
    col_means : ndarray, shape (p,)
        Raw column means removed before scaling (zeros when not centered).
    y_mean : float
        Raw response mean removed (0 when not centered).
    centered : bool
    """

    y: np.ndarray
    X: np.ndarray
    col_norms: np.ndarray
    col_means: np.ndarray
    y_mean: float
    centered: bool

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        """X'X."""
        return self.X.T @ self.X

    @cached_property
    def gram2(self) -> np.ndarray:
        """(X'X)(X'X), the Hessian of the L0 objective."""
        g = self.gram
        return g @ g

    @cached_property
    def lipschitz(self) -> float:
        """Gradient Lipschitz constant of 1/2 ||X'(t - Xb)||^2, i.e. lambda_max(X'X)^2."""
        lam = float(linalg.eigvalsh(self.gram)[-1])
        return lam * lam

    def transform(self, X_raw: np.ndarray, y_raw: np.ndarray | None = None):
        """Apply this design's centering and scaling to new rows."""
        X_new = (np.asarray(X_raw, dtype=float) - self.col_means) / self.col_norms
        if y_raw is None:
            return X_new
        return X_new, np.asarray(y_raw, dtype=float) - self.y_mean


def standardize(y_raw, X_raw, center: bool = False) -> StandardizedDesign:
    """Scale the columns of ``X_raw`` to unit norm, optionally centering first.

    Raises
    ------
    ValueError
        On shape mismatch, fewer than two rows, or a column whose (centered)
        norm is zero.
    """
    y = np.asarray(y_raw, dtype=float)
    X = np.asarray(X_raw, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if y.ndim != 1 or X.ndim != 2:
        raise ValueError("y must be a vector and X a matrix")
    n, p = X.shape
    if y.shape[0] != n:
        raise ValueError(f"dimension mismatch: y has {y.shape[0]} rows, X has {n}")
    if n < 2 or p < 1:
        raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values in input")

    if center:
        col_means = X.mean(axis=0)
        y_mean = float(y.mean())
        X = X - col_means
        y = y - y_mean
    else:
        col_means = np.zeros(p)
        y_mean = 0.0

    norms = np.sqrt(np.einsum("ij,ij->j", X, X))
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        raise ValueError(f"column {int(bad[0])} has zero norm")
    X = X / norms
    X.setflags(write=False)
    y = y.copy()
    y.setflags(write=False)
    return StandardizedDesign(
        y=y, X=X, col_norms=norms, col_means=col_means, y_mean=y_mean, centered=center
    )


@dataclass(frozen=True, eq=False)
class ModelFit:
    """Least-squares artifacts of one covariate subset."""

    model: ModelIndex
    beta_hat: np.ndarray
    rss: float
    sigma2_hat: float
    lambda_M: float
    chol: np.ndarray
    logdet: float

    @property
    def size(self) -> int:
        return len(self.model)


def _cholesky(A: np.ndarray) -> np.ndarray:
    try:
        L = linalg.cholesky(A, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise RankDeficient("X_M'X_M is not positive definite") from exc
    if np.min(np.diag(L)) ** 2 < PIVOT_TOL:
        raise RankDeficient("X_M has (numerically) linearly dependent columns")
    return L


def fit_model(d: StandardizedDesign, M: Sequence[int]) -> ModelFit:
    """Least-squares fit of ``y`` on the columns ``M``.

    The collinearity factor ``lambda_M = tr((H_M X)'(H_M X))`` is evaluated as
    ``||L^{-1} X_M'X||_F^2`` with ``L`` the Cholesky factor of ``X_M'X_M``, which
    never forms the n x n hat matrix.
    """
    M = model_index(M, d.p)
    k = len(M)
    if k == 0:
        raise ValueError("empty model")
    if k > d.n:
        raise RankDeficient(f"|M| = {k} exceeds n = {d.n}")
    idx = list(M)
    XM = d.X[:, idx]
    L = _cholesky(d.gram[np.ix_(idx, idx)])
    beta_hat = linalg.cho_solve((L, True), XM.T @ d.y, check_finite=False)
    resid = d.y - XM @ beta_hat
    rss = float(resid @ resid)
    sigma2 = rss / (d.n - k) if d.n > k else 0.0
    Z = linalg.solve_triangular(L, d.gram[idx, :], lower=True, check_finite=False)
    lam = float(np.einsum("ij,ij->", Z, Z))
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return ModelFit(
        model=M, beta_hat=beta_hat, rss=rss, sigma2_hat=sigma2, lambda_M=lam, chol=L, logdet=logdet
    )


def delta_m(d: StandardizedDesign, M: Sequence[int], M_o: Sequence[int], beta0) -> float:
    """Squared distance between the mean ``X_{M_o} beta0`` and its projection onto span(X_M)."""
    M = model_index(M, d.p)
    M_o = model_index(M_o, d.p)
    beta0 = np.asarray(beta0, dtype=float)
    if beta0.shape != (len(M_o),):
        raise ValueError("beta0 must have one entry per covariate in M_o")
    if len(M) > d.n:
        raise RankDeficient(f"|M| = {len(M)} exceeds n = {d.n}")
    idx = list(M)
    mu = d.X[:, list(M_o)] @ beta0
    L = _cholesky(d.gram[np.ix_(idx, idx)])
    coef = linalg.cho_solve((L, True), d.X[:, idx].T @ mu, check_finite=False)
    r = mu - d.X[:, idx] @ coef
    return float(r @ r)
