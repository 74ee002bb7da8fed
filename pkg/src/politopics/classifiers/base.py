"""Shared training-set container and the score dispatch for all heads."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, TrainingError


@dataclass
class LabeledSet:
    """Embeddings with ±1 labels for one topic's one-vs-all problem."""

    X: np.ndarray
    y: np.ndarray
    topic: object = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2:
            raise TrainingError(f"X must be 2-D, got shape {self.X.shape}")
        if len(self.X) != len(self.y):
            raise TrainingError(f"|X|={len(self.X)} but |y|={len(self.y)}")
        if len(self.X) < 2:
            raise TrainingError("need at least 2 training samples")
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise TrainingError("labels must be +1 or -1")

    @property
    def dim(self):
        return self.X.shape[1]

    def require_both_classes(self):
        if len(np.unique(self.y)) < 2:
            raise TrainingError("training set contains a single class")


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def topic_seed(base_seed: int, topic) -> int:
    """Per-topic seed, stable across runs and scheduling order."""
    digest = hashlib.blake2b(str(topic).encode("utf-8"), digest_size=4).digest()
    return (base_seed + int.from_bytes(digest, "big")) % (2**32)


def _check_dim(model, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise InputError(f"input has shape {x.shape}, model expects ({model.dim},)")
    return x


def predict_score(model, x) -> float:
    """Score in [0, 1] for a single embedding; label is score >= 0.5."""
    x = _check_dim(model, x)
    return float(model.score_one(x))


def predict_label(model, x) -> int:
    return 1 if predict_score(model, x) >= 0.5 else -1
