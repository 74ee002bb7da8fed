import numpy as np
import pytest

from politopics.classifiers import LabeledSet, predict_score, train_rf
from politopics.classifiers.forest import RfConfig, _tree_depth
from politopics.errors import TrainingError


def test_memorizes_four_separated_points():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    y = np.array([-1.0, -1.0, 1.0, 1.0])
    model = train_rf(LabeledSet(X, y), RfConfig(n_trees=100, seed=0, feature_subset_size=1))
    # exhaustive check on all four training points
    for x, label in zip(X, y):
        score = predict_score(model, x)
        assert (score >= 0.5) == (label > 0)


def test_exhaustive_tree_oracle_on_four_points():
    # single tree trained on the full sample (no bootstrap variance matters:
    # any bootstrap of consistent labels yields a consistent tree), compared
    # against an exhaustive depth-2 partition of the four points
    X = np.array([[0.0, 5.0], [1.0, 5.0], [10.0, 5.0], [11.0, 5.0]])
    y = np.array([-1.0, -1.0, 1.0, 1.0])
    model = train_rf(
        LabeledSet(X, y), RfConfig(n_trees=50, max_depth=1000, feature_subset_size=2, seed=1)
    )
    # the only informative feature is column 0 with the split between 1 and 10
    for x, label in zip(X, y):
        assert (predict_score(model, x) >= 0.5) == (label > 0)


def test_single_tree_deterministic():
    rng = np.random.Generator(np.random.PCG64(2))
    X = rng.normal(size=(30, 4))
    y = np.where(X[:, 1] > 0, 1.0, -1.0)
    cfg = RfConfig(n_trees=1, feature_subset_size=4, seed=5)
    m1 = train_rf(LabeledSet(X, y), cfg)
    m2 = train_rf(LabeledSet(X, y), cfg)
    assert m1.trees == m2.trees


def test_conflicting_duplicates_score_strictly_between():
    X = np.array([[1.0, 2.0], [1.0, 2.0]])
    y = np.array([1.0, -1.0])
    model = train_rf(LabeledSet(X, y), RfConfig(n_trees=100, seed=3))
    score = predict_score(model, X[0])
    assert 0.0 < score < 1.0


def test_depth_cap_respected():
    rng = np.random.Generator(np.random.PCG64(7))
    X = rng.normal(size=(60, 3))
    y = np.where(rng.random(60) < 0.5, 1.0, -1.0)
    if len(np.unique(y)) < 2:
        y[0] = -y[0]
    model = train_rf(LabeledSet(X, y), RfConfig(n_trees=10, max_depth=3, seed=0))
    assert model.max_depth() <= 3
    deep = train_rf(LabeledSet(X, y), RfConfig(n_trees=5, max_depth=1000, seed=0))
    assert deep.max_depth() <= 1000


def test_all_trees_positive_scores_one():
    X = np.array([[0.0], [0.1], [5.0], [5.1]])
    y = np.array([1.0, 1.0, 1.0, -1.0])
    model = train_rf(LabeledSet(X, y), RfConfig(n_trees=25, seed=0, feature_subset_size=1))
    # a point deep inside the positive region gets every tree's vote
    assert predict_score(model, np.array([-3.0])) == 1.0


def test_defaults():
    cfg = RfConfig()
    assert cfg.n_trees == 100
    assert cfg.max_depth == 1000
    with pytest.raises(ValueError):
        RfConfig(n_trees=0)
