"""Logistic head trained with class-weighted cross entropy.

Mirrors the neural-network detector: a single linear layer plus sigmoid over
frozen embeddings, trained by seeded mini-batch gradient descent (5 epochs,
batch 32 by default). Class weights follow the balanced inverse-frequency
formula w_pos = N / (2 N_pos), w_neg = N / (2 N_neg).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import LabeledSet, sigmoid


@dataclass
class LogisticConfig:
    epochs: int = 5
    batch_size: int = 32
    lr: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    config: LogisticConfig = field(default_factory=LogisticConfig)
    class_weights: tuple = (1.0, 1.0)  # (w_pos, w_neg)

    @property
    def dim(self):
        return len(self.weights)

    def margin(self, x):
        return float(self.weights @ x + self.bias)

    def score_one(self, x):
        return sigmoid(self.margin(x))


def class_weights_for(y) -> tuple:
    """Balanced inverse-frequency weights (w_pos, w_neg)."""
    y = np.asarray(y)
    n = len(y)
    n_pos = int(np.sum(y > 0))
    n_neg = n - n_pos
    return n / (2.0 * n_pos), n / (2.0 * n_neg)


def _sample_weights(y, class_weights):
    w_pos, w_neg = class_weights
    return np.where(y > 0, w_pos, w_neg)


def weighted_loss(weights, bias, X, y, class_weights) -> float:
    """Mean per-sample weighted binary cross entropy, labels in {+1, -1}.

    Uses log(1 + exp(-y z)) in its numerically stable form.
    """
    z = X @ weights + bias
    margins = y * z
    losses = np.logaddexp(0.0, -margins)
    return float(np.mean(_sample_weights(y, class_weights) * losses))


def weighted_grad(weights, bias, X, y, class_weights):
    """Analytic gradient of weighted_loss w.r.t. (weights, bias)."""
    z = X @ weights + bias
    # d/dz log(1+exp(-y z)) = -y * sigmoid(-y z)
    coef = _sample_weights(y, class_weights) * (-y) * sigmoid(-y * z)
    grad_w = X.T @ coef / len(y)
    grad_b = float(np.mean(coef))
    return grad_w, grad_b


def train_logistic(data: LabeledSet, config: LogisticConfig | None = None) -> LogisticModel:
    """Seeded mini-batch gradient descent on the weighted cross entropy."""
    data.require_both_classes()
    config = config or LogisticConfig()
    cw = class_weights_for(data.y)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = len(data.y)
    weights = np.zeros(data.dim)
    bias = 0.0
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            grad_w, grad_b = weighted_grad(
                weights, bias, data.X[batch], data.y[batch], cw
            )
            weights = weights - config.lr * grad_w
            bias = bias - config.lr * grad_b
    if not (np.all(np.isfinite(weights)) and np.isfinite(bias)):
        raise ValueError("training diverged to non-finite parameters")
    return LogisticModel(weights=weights, bias=bias, config=config, class_weights=cw)
