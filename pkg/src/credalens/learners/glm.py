"""Logistic generalized linear model.

Unconstrained fits use iteratively reweighted least squares; the
non-negative variant (used by the stacked-ensemble meta-learner) uses
projected Newton coordinate descent.  Both minimize the mean binomial
deviance plus an l2 penalty on the slopes (the intercept is never
penalized or constrained).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonFinite

L2_FLOOR = 1e-8


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class GlmModel:
    """Coefficients live in the standardized column space recorded here."""

    coefficients: np.ndarray
    intercept: float
    l2: float
    non_negative: bool
    mean: np.ndarray
    scale: np.ndarray

    @property
    def width(self) -> int:
        return len(self.coefficients)

    def linear_predictor(self, X: np.ndarray) -> np.ndarray:
        Z = (X - self.mean) / self.scale
        return Z @ self.coefficients + self.intercept

    def predict(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.linear_predictor(X))


def _standardize(X: np.ndarray, enabled: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not enabled:
        w = X.shape[1]
        return X.astype(np.float64, copy=False), np.zeros(w), np.ones(w)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    return (X - mean) / scale, mean, scale


def fit_glm(
    X,
    y: np.ndarray,
    l2: float = 1e-4,
    non_negative: bool = False,
    max_iter: int = 100,
    tol: float = 1e-7,
    standardize: bool = True,
) -> GlmModel:
    """Fit a binomial GLM with a logit link.

    Columns are standardized internally (zero-variance columns end up with
    coefficient exactly 0); an l2 floor keeps the system well posed even at
    l2 = 0.  Deterministic: no randomness is consumed.
    """
    values = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, w = values.shape
    lam = max(float(l2), L2_FLOOR)
    Z, mean, scale = _standardize(values, standardize)

    if non_negative:
        beta, intercept = _fit_coordinate_descent(Z, y, lam, max_iter, tol)
    else:
        beta, intercept = _fit_irls(Z, y, lam, max_iter, tol)
    if not (np.all(np.isfinite(beta)) and np.isfinite(intercept)):
        raise NonFinite("GLM coefficients diverged")
    return GlmModel(beta, float(intercept), float(l2), non_negative, mean, scale)


def _fit_irls(Z: np.ndarray, y: np.ndarray, lam: float, max_iter: int, tol: float):
    n, w = Z.shape
    p_bar = np.clip(y.mean(), 1e-12, 1 - 1e-12)
    A = np.hstack([Z, np.ones((n, 1))])
    coef = np.zeros(w + 1)
    coef[-1] = np.log(p_bar / (1 - p_bar))
    penalty = np.full(w + 1, lam)
    penalty[-1] = 0.0
    for _ in range(max_iter):
        eta = A @ coef
        p = sigmoid(eta)
        wgt = np.clip(p * (1.0 - p), 1e-10, None)
        z = eta + (y - p) / wgt
        Aw = A * wgt[:, None]
        lhs = (A.T @ Aw) / n + np.diag(penalty)
        rhs = (Aw.T @ z) / n
        try:
            new_coef = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as exc:
            raise NonFinite(f"IRLS system singular: {exc}") from exc
        if not np.all(np.isfinite(new_coef)):
            raise NonFinite("IRLS produced non-finite coefficients")
        delta = np.max(np.abs(new_coef - coef))
        coef = new_coef
        if delta < tol:
            break
    return coef[:-1], coef[-1]


def _fit_coordinate_descent(Z: np.ndarray, y: np.ndarray, lam: float, max_iter: int, tol: float):
    """Cyclic projected Newton steps; slopes clamped to >= 0."""
    n, w = Z.shape
    beta = np.zeros(w)
    p_bar = np.clip(y.mean(), 1e-12, 1 - 1e-12)
    intercept = float(np.log(p_bar / (1 - p_bar)))
    eta = np.full(n, intercept)
    sq = Z * Z
    for _ in range(max_iter):
        p = sigmoid(eta)
        wgt = p * (1.0 - p)
        grad0 = float(np.mean(p - y))
        hess0 = max(float(np.mean(wgt)), 1e-10)
        step = -grad0 / hess0
        intercept += step
        eta += step
        max_delta = abs(step)
        for j in range(w):
            p = sigmoid(eta)
            wgt = p * (1.0 - p)
            g = float(Z[:, j] @ (p - y)) / n + lam * beta[j]
            h = float(sq[:, j] @ wgt) / n + lam
            if h <= 1e-12:
                continue
            new_bj = max(0.0, beta[j] - g / h)
            delta = new_bj - beta[j]
            if delta != 0.0:
                eta += delta * Z[:, j]
                beta[j] = new_bj
                max_delta = max(max_delta, abs(delta))
        if not np.all(np.isfinite(eta)):
            raise NonFinite("coordinate descent diverged")
        if max_delta < tol:
            break
    return beta, intercept
