"""Random forest: bagged Gini decision trees with per-node feature subsets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError
from .base import LabeledSet


@dataclass
class RfConfig:
    n_trees: int = 100
    max_depth: int = 1000
    feature_subset_size: int | None = None  # None -> ceil(sqrt(d))
    min_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


def _gini_pair(n_pos, n_neg):
    n = n_pos + n_neg
    if n == 0:
        return 0.0
    p = n_pos / n
    return 2.0 * p * (1.0 - p)


def _best_split(X, y, features):
    """Best (feature, threshold, gini) over the candidate features, or None."""
    best = None
    n = len(y)
    pos = (y > 0).astype(np.float64)
    for f in features:
        values = X[:, f]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        sp = pos[order]
        # distinct-value boundaries only
        cut = np.nonzero(sv[1:] > sv[:-1])[0]
        if len(cut) == 0:
            continue
        cum_pos = np.cumsum(sp)
        left_n = cut + 1
        left_pos = cum_pos[cut]
        right_n = n - left_n
        right_pos = cum_pos[-1] - left_pos
        lp = left_pos / left_n
        rp = right_pos / right_n
        impurity = (
            left_n * 2.0 * lp * (1.0 - lp) + right_n * 2.0 * rp * (1.0 - rp)
        ) / n
        k = int(np.argmin(impurity))
        if best is None or impurity[k] < best[2] - 1e-15:
            threshold = 0.5 * (sv[cut[k]] + sv[cut[k] + 1])
            best = (int(f), float(threshold), float(impurity[k]))
    return best


def _grow(X, y, depth, config, rng):
    n_pos = int(np.sum(y > 0))
    n = len(y)
    pos_frac = n_pos / n
    if depth >= config.max_depth or n_pos in (0, n) or n <= config.min_leaf:
        return {"leaf": pos_frac}
    d = X.shape[1]
    m = config.feature_subset_size or math.ceil(math.sqrt(d))
    features = rng.choice(d, size=min(m, d), replace=False)
    split = _best_split(X, y, features)
    if split is None or split[2] >= _gini_pair(n_pos, n - n_pos) - 1e-15:
        return {"leaf": pos_frac}
    f, threshold, _ = split
    mask = X[:, f] <= threshold
    return {
        "feature": f,
        "threshold": threshold,
        "left": _grow(X[mask], y[mask], depth + 1, config, rng),
        "right": _grow(X[~mask], y[~mask], depth + 1, config, rng),
    }


def _tree_depth(node):
    if "leaf" in node:
        return 0
    return 1 + max(_tree_depth(node["left"]), _tree_depth(node["right"]))


def _tree_leaf_frac(node, x):
    while "leaf" not in node:
        node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
    return node["leaf"]


@dataclass
class RfModel:
    trees: list
    dim: int
    config: RfConfig = field(default_factory=RfConfig)

    def score_one(self, x):
        """Fraction of trees voting +1; a tied leaf contributes half a vote."""
        votes = 0.0
        for tree in self.trees:
            frac = _tree_leaf_frac(tree, x)
            if frac > 0.5:
                votes += 1.0
            elif frac == 0.5:
                votes += 0.5
        return votes / len(self.trees)

    def max_depth(self):
        return max(_tree_depth(t) for t in self.trees)


def train_rf(data: LabeledSet, config: RfConfig | None = None) -> RfModel:
    """Grow seeded bootstrap trees; deterministic given (data order, seed)."""
    config = config or RfConfig()
    n = len(data.y)
    if n == 0:
        raise TrainingError("empty training set")
    streams = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    trees = []
    for seq in streams:
        rng = np.random.Generator(np.random.PCG64(seq))
        sample = rng.integers(0, n, size=n)
        trees.append(_grow(data.X[sample], data.y[sample], 0, config, rng))
    return RfModel(trees=trees, dim=data.dim, config=config)
