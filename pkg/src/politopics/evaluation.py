"""Stratified K-fold one-vs-all evaluation with TPR/TNR mean-std reporting."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .classifiers import (
    LabeledSet,
    LogisticConfig,
    RfConfig,
    predict_score,
    topic_seed,
    train_logistic,
    train_rf,
    train_svm,
)
from .corpus import Corpus, TopicId
from .errors import EvaluationError

HEADS = ("logistic", "svm", "rf")


@dataclass
class FoldPlan:
    """Stratified fold assignment for one topic's one-vs-all split."""

    k: int
    assignments: dict[str, int]
    seed: int
    topic: TopicId | None = None

    def fold_ids(self, fold: int):
        return [doc_id for doc_id, f in self.assignments.items() if f == fold]


@dataclass
class ConfusionCounts:
    tp: int = 0
    fn: int = 0
    tn: int = 0
    fp: int = 0

    @property
    def positives(self):
        return self.tp + self.fn

    @property
    def negatives(self):
        return self.tn + self.fp


@dataclass
class MetricsSummary:
    topic: TopicId
    fold_tpr: list[float] = field(default_factory=list)
    fold_tnr: list[float] = field(default_factory=list)

    @property
    def tpr_mean(self):
        return float(np.mean(self.fold_tpr))

    @property
    def tpr_std(self):
        # population std: the k fold scores are the whole population
        return float(np.std(self.fold_tpr))

    @property
    def tnr_mean(self):
        return float(np.mean(self.fold_tnr))

    @property
    def tnr_std(self):
        return float(np.std(self.fold_tnr))


def make_folds(corpus: Corpus, topic: TopicId, k: int = 5, seed: int = 0) -> FoldPlan:
    """Shuffle positives and negatives separately, deal each round-robin.

    Per-fold positive counts then differ by at most one, and the folds
    partition the corpus. Deterministic given the seed.
    """
    if k < 2:
        raise EvaluationError(f"k must be >= 2, got {k}")
    positives = [doc.id for doc in corpus if topic in doc.labels]
    negatives = [doc.id for doc in corpus if topic not in doc.labels]
    if len(positives) < k or len(negatives) < k:
        raise EvaluationError(
            f"topic {topic}: need >= {k} positives and negatives, "
            f"have {len(positives)}/{len(negatives)}"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    assignments = {}
    for group in (positives, negatives):
        order = rng.permutation(len(group))
        for position, index in enumerate(order):
            assignments[group[index]] = position % k
    return FoldPlan(k=k, assignments=assignments, seed=seed, topic=topic)


def rates(counts: ConfusionCounts) -> tuple[float, float]:
    """(TPR, TNR) = (tp/(tp+fn), tn/(tn+fp))."""
    if counts.positives < 1 or counts.negatives < 1:
        raise EvaluationError(
            f"rates undefined: {counts.positives} positives, {counts.negatives} negatives"
        )
    return counts.tp / counts.positives, counts.tn / counts.negatives


def train_head(head: str, data: LabeledSet, seed: int, params: dict | None = None):
    """Train one detector head by name; params are head-specific overrides."""
    params = dict(params or {})
    if head == "logistic":
        return train_logistic(
            data,
            LogisticConfig(
                epochs=int(params.get("epochs", 5)),
                batch_size=int(params.get("batch_size", 32)),
                lr=float(params.get("lr", 0.01)),
                seed=seed,
            ),
        )
    if head == "svm":
        return train_svm(
            data,
            C=float(params.get("C", 1.0)),
            gamma=params.get("gamma", "auto"),
            tol=float(params.get("tol", 1e-3)),
        )
    if head == "rf":
        return train_rf(
            data,
            RfConfig(
                n_trees=int(params.get("n_trees", 100)),
                max_depth=int(params.get("max_depth", 1000)),
                feature_subset_size=params.get("feature_subset_size"),
                seed=seed,
            ),
        )
    raise EvaluationError(f"unknown head {head!r} (expected one of {HEADS})")


def evaluate_topic(
    corpus: Corpus,
    topic: TopicId,
    store,
    folds: FoldPlan,
    head: str = "svm",
    params: dict | None = None,
    base_seed: int = 0,
) -> MetricsSummary:
    """Train on k-1 folds, test on the held-out fold, for every fold."""
    doc_ids = [doc.id for doc in corpus]
    missing = [d for d in doc_ids if d not in store]
    if missing:
        raise EvaluationError(f"missing embeddings for {len(missing)} documents")
    X = store.matrix(doc_ids)
    y = np.array([1.0 if topic in corpus[d].labels else -1.0 for d in doc_ids])
    fold_of = np.array([folds.assignments[d] for d in doc_ids])
    seed = topic_seed(base_seed, topic)

    summary = MetricsSummary(topic=topic)
    for fold in range(folds.k):
        train_mask = fold_of != fold
        try:
            model = train_head(
                head, LabeledSet(X[train_mask], y[train_mask], topic), seed, params
            )
        except Exception as exc:
            raise EvaluationError(f"fold {fold}: {exc}") from exc
        counts = ConfusionCounts()
        for i in np.nonzero(~train_mask)[0]:
            predicted = bool(predict_score(model, X[i]) >= 0.5)
            if y[i] > 0:
                counts.tp += int(predicted)
                counts.fn += int(not predicted)
            else:
                counts.fp += int(predicted)
                counts.tn += int(not predicted)
        tpr, tnr = rates(counts)
        summary.fold_tpr.append(tpr)
        summary.fold_tnr.append(tnr)
    return summary


def format_cell(mean: float, std: float) -> str:
    """Parts-per-unit cell, e.g. mean .87 / std .09 -> ".87 (.09)"."""

    def fmt(x):
        q = Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
        text = f"{q:.2f}"
        return text[1:] if text.startswith("0.") else text

    return f"{fmt(mean)} ({fmt(std)})"


def render_table(summaries: dict[TopicId, MetricsSummary], layout: str = "by-classifier") -> str:
    """Text table, one row per topic in topic-id order."""
    if layout not in ("by-classifier", "by-backbone"):
        raise EvaluationError(f"unknown layout {layout!r}")
    rows = [("Topic", "TPR", "TNR")]
    for topic in sorted(summaries):
        s = summaries[topic]
        rows.append(
            (
                str(topic),
                format_cell(s.tpr_mean, s.tpr_std),
                format_cell(s.tnr_mean, s.tnr_std),
            )
        )
    widths = [max(len(r[c]) for r in rows) for c in range(3)]
    lines = []
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
