"""Soft-margin RBF SVM trained by sequential minimal optimization.

Solves the dual

    min_a  1/2 a' Q a - e' a    s.t.  y' a = 0,  0 <= a <= C,

with Q_ij = y_i y_j K(x_i, x_j) and K the RBF kernel exp(-gamma ||x - x'||^2),
using maximal-violating-pair working-set selection. Convergence is declared
when the KKT gap m(a) - M(a) drops to the tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError, TrainingError
from .base import LabeledSet, sigmoid


def rbf_kernel(A, B, gamma: float) -> np.ndarray:
    """Pairwise exp(-gamma ||a - b||^2) between rows of A and B."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def resolve_gamma(X, gamma) -> float:
    """'auto' resolves to 1 / (d * mean per-feature variance); 1.0 if flat."""
    if gamma == "auto":
        variance = float(np.mean(np.var(X, axis=0)))
        if variance <= 0:
            return 1.0
        return 1.0 / (X.shape[1] * variance)
    gamma = float(gamma)
    if gamma <= 0:
        raise TrainingError(f"gamma must be positive, got {gamma}")
    return gamma


@dataclass
class SvmModel:
    """Support vectors with coefficients a_i y_i; points with a_i = 0 are dropped."""

    support_x: np.ndarray
    dual_coef: np.ndarray  # a_i * y_i per retained point
    bias: float
    C: float
    gamma: float
    kkt_violation: float = 0.0
    dual_objective: float = 0.0

    @property
    def dim(self):
        return self.support_x.shape[1]

    def decision(self, x) -> float:
        k = rbf_kernel(self.support_x, np.asarray(x)[None, :], self.gamma)[:, 0]
        return float(self.dual_coef @ k + self.bias)

    def score_one(self, x):
        # Sigmoid calibration with unit slope over the margin.
        return sigmoid(self.decision(x))


def dual_objective(alpha, Q) -> float:
    """Maximization-form dual value: e'a - 1/2 a' Q a."""
    return float(np.sum(alpha) - 0.5 * alpha @ Q @ alpha)


def _kkt_gap(grad, y, alpha, C):
    """(m - M, argmax index, argmin index) of the violating-pair criterion."""
    neg_yg = -y * grad
    up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
    low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
    if not up.any() or not low.any():
        return 0.0, -1, -1
    up_idx = np.where(up)[0]
    low_idx = np.where(low)[0]
    i = up_idx[np.argmax(neg_yg[up_idx])]
    j = low_idx[np.argmin(neg_yg[low_idx])]
    return float(neg_yg[i] - neg_yg[j]), int(i), int(j)


def train_svm(
    data: LabeledSet,
    C: float = 1.0,
    gamma="auto",
    tol: float = 1e-3,
    max_iter: int = 100_000,
) -> SvmModel:
    """SMO over the precomputed kernel matrix until the KKT gap <= tol."""
    data.require_both_classes()
    if C <= 0:
        raise TrainingError(f"C must be positive, got {C}")
    X, y = data.X, data.y
    n = len(y)
    gamma = resolve_gamma(X, gamma)

    K = rbf_kernel(X, X, gamma)
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)  # grad of 1/2 a'Qa - e'a at a = 0

    gap = np.inf
    for _ in range(max_iter):
        gap, i, j = _kkt_gap(grad, y, alpha, C)
        if gap <= tol:
            break
        # Analytic solve for the (i, j) pair along the equality constraint.
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 1e-12:
            eta = 1e-12
        delta = (-y[i] * grad[i] + y[j] * grad[j]) / eta
        # Clip so both a_i and a_j stay inside [0, C].
        if y[i] > 0:
            delta = min(delta, C - alpha[i])
        else:
            delta = min(delta, alpha[i])
        if y[j] > 0:
            delta = min(delta, alpha[j])
        else:
            delta = min(delta, C - alpha[j])
        alpha[i] += y[i] * delta
        alpha[j] -= y[j] * delta
        grad += Q[:, i] * (y[i] * delta) + Q[:, j] * (-y[j] * delta)
    else:
        raise ConvergenceError("SMO did not converge within the iteration cap", gap)

    # Bias from free support vectors; midpoint of the feasible interval if none.
    neg_yg = -y * grad
    free = (alpha > 1e-8) & (alpha < C - 1e-8)
    if free.any():
        bias = float(np.mean(neg_yg[free]))
    else:
        gap_now, i, j = _kkt_gap(grad, y, alpha, C)
        bias = float((neg_yg[i] + neg_yg[j]) / 2.0) if i >= 0 else 0.0

    objective = dual_objective(alpha, Q)
    keep = alpha > 1e-12
    return SvmModel(
        support_x=X[keep].copy(),
        dual_coef=(alpha * y)[keep].copy(),
        bias=bias,
        C=C,
        gamma=gamma,
        kkt_violation=max(gap, 0.0),
        dual_objective=objective,
    )
