"""Multi-label topic classification toolkit for parliamentary initiative texts.

Pipeline: regex keyword annotation, deterministic corpus curation, one-vs-all
binary topic detectors (logistic / SMO-trained RBF SVM / random forest) over
text embeddings, stratified 5-fold TPR/TNR evaluation, and multi-label
prediction aggregation.
"""

from .aggregation import AggregationPolicy, TopicScoreSet, aggregate
from .annotate import CompiledMatcher, TopicRuleSet, annotate, compile_rules
from .corpus import Corpus, Document, TopicId, read_corpus, write_corpus
from .curation import CurationConfig, CurationReport, curate, normalize_text, should_drop
from .embeddings import EmbeddingStore, embed_corpus, hashed_embed, load_store, write_store
from .evaluation import (
    ConfusionCounts,
    FoldPlan,
    MetricsSummary,
    evaluate_topic,
    make_folds,
    rates,
    render_table,
)

__version__ = "0.1.0"
