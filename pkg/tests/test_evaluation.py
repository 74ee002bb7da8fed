import numpy as np
import pytest

import politopics.evaluation as evaluation
from politopics.corpus import Corpus, Document, TopicId
from politopics.embeddings import embed_corpus
from politopics.errors import EvaluationError
from politopics.evaluation import (
    ConfusionCounts,
    MetricsSummary,
    evaluate_topic,
    format_cell,
    make_folds,
    rates,
    render_table,
)

from synthdata import make_keyword_corpus

TOPIC = TopicId("T", 1)


def labeled_corpus(n_pos, n_neg):
    docs = [
        Document(f"p{i}", "positivo", labels=frozenset([TOPIC])) for i in range(n_pos)
    ] + [Document(f"n{i}", "negativo") for i in range(n_neg)]
    return Corpus(docs)


def test_balanced_folds_exactly_one_each():
    corpus = labeled_corpus(5, 5)
    plan = make_folds(corpus, TOPIC, k=5, seed=0)
    for fold in range(5):
        ids = plan.fold_ids(fold)
        assert sum(1 for d in ids if d.startswith("p")) == 1
        assert sum(1 for d in ids if d.startswith("n")) == 1


def test_fold_positive_counts_differ_by_at_most_one():
    corpus = labeled_corpus(518, 1000)
    plan = make_folds(corpus, TOPIC, k=5, seed=1)
    counts = [
        sum(1 for d in plan.fold_ids(f) if d.startswith("p")) for f in range(5)
    ]
    assert sorted(set(counts)) == [103, 104]
    # partition: every doc in exactly one fold
    assert sorted(plan.assignments) == sorted(d.id for d in corpus)


def test_fold_determinism():
    corpus = labeled_corpus(20, 30)
    p1 = make_folds(corpus, TOPIC, k=5, seed=9)
    p2 = make_folds(corpus, TOPIC, k=5, seed=9)
    assert p1.assignments == p2.assignments
    p3 = make_folds(corpus, TOPIC, k=5, seed=10)
    assert p3.assignments != p1.assignments


def test_insufficient_counts_named_error():
    corpus = labeled_corpus(3, 50)
    with pytest.raises(EvaluationError, match="T_1"):
        make_folds(corpus, TOPIC, k=5, seed=0)
    with pytest.raises(EvaluationError):
        make_folds(labeled_corpus(5, 5), TOPIC, k=1, seed=0)


def test_rates_formula():
    assert rates(ConfusionCounts(tp=3, fn=1, tn=8, fp=2)) == (0.75, 0.80)
    assert rates(ConfusionCounts(tp=4, fn=0, tn=6, fp=0)) == (1.0, 1.0)


def test_rates_undefined():
    with pytest.raises(EvaluationError):
        rates(ConfusionCounts(tp=3, fn=1, tn=0, fp=0))
    with pytest.raises(EvaluationError):
        rates(ConfusionCounts(tp=0, fn=0, tn=5, fp=1))


class _AlwaysPositive:
    dim = 8

    def score_one(self, x):
        return 1.0


def test_degenerate_detector_tpr_one_tnr_zero(monkeypatch):
    corpus = labeled_corpus(10, 10)
    store = embed_corpus(corpus, dim=8, seed=0)
    plan = make_folds(corpus, TOPIC, k=5, seed=0)
    monkeypatch.setattr(
        evaluation, "train_head", lambda head, data, seed, params: _AlwaysPositive()
    )
    summary = evaluate_topic(corpus, TOPIC, store, plan, head="svm")
    assert summary.tpr_mean == 1.0
    assert summary.tnr_mean == 0.0


def test_summary_mean_std_recomputable():
    s = MetricsSummary(topic=TOPIC, fold_tpr=[0.8] * 5, fold_tnr=[0.5, 0.6, 0.7, 0.8, 0.9])
    assert s.tpr_mean == pytest.approx(0.80, abs=1e-12)
    assert s.tpr_std == pytest.approx(0.0, abs=1e-12)
    assert s.tnr_mean == pytest.approx(np.mean(s.fold_tnr), abs=1e-12)
    # population standard deviation, not the sample one
    assert s.tnr_std == pytest.approx(np.std(s.fold_tnr, ddof=0), abs=1e-12)


def test_svm_head_on_separable_synthetic():
    topic = TopicId("Vacuna", 1)
    corpus = make_keyword_corpus(120, {topic: "vacuna"}, seed=3, p_topic=0.4)
    store = embed_corpus(corpus, dim=128, seed=0)
    plan = make_folds(corpus, topic, k=5, seed=0)
    summary = evaluate_topic(corpus, topic, store, plan, head="svm")
    assert summary.tpr_mean >= 0.95
    assert summary.tnr_mean >= 0.95


def test_missing_embeddings_error():
    corpus = labeled_corpus(5, 5)
    store = embed_corpus(labeled_corpus(5, 4), dim=8)
    plan = make_folds(corpus, TOPIC, k=5, seed=0)
    with pytest.raises(EvaluationError, match="missing embeddings"):
        evaluate_topic(corpus, TOPIC, store, plan)


def test_format_cell_paper_style():
    assert format_cell(0.87, 0.09) == ".87 (.09)"
    assert format_cell(1.0, 0.0) == "1.00 (.00)"
    assert format_cell(0.975, 0.0) == ".98 (.00)"  # round half up


def test_render_table_topic_order():
    summaries = {
        TopicId("B", 1): MetricsSummary(TopicId("B", 1), [1.0] * 5, [0.5] * 5),
        TopicId("A", 2): MetricsSummary(TopicId("A", 2), [0.87] * 5, [0.9] * 5),
    }
    table = render_table(summaries)
    lines = table.splitlines()
    assert lines[0].split()[:3] == ["Topic", "TPR", "TNR"]
    assert lines[2].startswith("A_2")
    assert lines[3].startswith("B_1")
    assert ".87 (.00)" in lines[2]
    with pytest.raises(EvaluationError):
        render_table(summaries, layout="sideways")


def test_unknown_head_rejected():
    with pytest.raises(EvaluationError, match="unknown head"):
        evaluation.train_head("mlp", None, 0, None)
