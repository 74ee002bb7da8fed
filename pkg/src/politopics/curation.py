"""Deterministic corpus cleaning with per-rule drop accounting.

Rule order is fixed: normalize, then drop unlabeled documents, then apply
duplicate / too_short / lowercase_start / bad_prefix / coofficial_language in
that order (first match wins). The optional restriction to the N most
frequent topics is a separate, explicit step at the end.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

from .corpus import Corpus, Document, TopicId

DEFAULT_KEEP_PUNCT = frozenset("()-.¿?¡!_;")

# Order matters: the first firing rule is charged with the drop.
RULE_ORDER = (
    "unlabeled",
    "duplicate",
    "too_short",
    "lowercase_start",
    "bad_prefix",
    "coofficial_language",
    "topic_filter",
)

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")
_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


@dataclass
class CurationConfig:
    min_chars: int = 100
    bad_prefixes: tuple = ("CSV", "núm")
    coofficial_words: frozenset = frozenset()
    coofficial_min_hits: int = 2
    keep_punct: frozenset = DEFAULT_KEEP_PUNCT
    id_patterns: tuple = ()
    top_topics: int | None = None

    def __post_init__(self):
        if self.min_chars < 0:
            raise ValueError("min_chars must be >= 0")
        if self.coofficial_min_hits < 1:
            raise ValueError("coofficial_min_hits must be >= 1")
        self.bad_prefixes = tuple(self.bad_prefixes)
        self.coofficial_words = frozenset(w.casefold() for w in self.coofficial_words)
        self.keep_punct = frozenset(self.keep_punct)
        self.id_patterns = tuple(self.id_patterns)


@dataclass
class CurationReport:
    input_count: int = 0
    kept_count: int = 0
    drops: dict[str, int] = field(default_factory=dict)
    topics_before: dict[TopicId, int] = field(default_factory=dict)
    topics_after: dict[TopicId, int] = field(default_factory=dict)

    def check_partition(self):
        return self.input_count == self.kept_count + sum(self.drops.values())


def _is_allowed_char(ch: str, keep_punct: frozenset) -> bool:
    if ch == " " or ch in keep_punct:
        return True
    category = unicodedata.category(ch)
    return category.startswith("L") or category == "Nd"


def normalize_text(text: str, config: CurationConfig) -> str:
    """Strip URLs, initiative identifiers and stray characters; collapse runs
    of whitespace to single spaces."""
    text = _URL_RE.sub(" ", text)
    for pattern in config.id_patterns:
        text = re.sub(pattern, " ", text)
    text = "".join(
        ch if _is_allowed_char(ch, config.keep_punct) else " " for ch in text
    )
    return _WS_RE.sub(" ", text).strip()


def should_drop(doc: Document, seen_texts: set, config: CurationConfig) -> str | None:
    """Name of the first firing drop rule, or None to keep.

    ``doc.text`` must already be normalized.
    """
    text = doc.text
    if text in seen_texts:
        return "duplicate"
    if len(text) < config.min_chars:
        return "too_short"
    if text and text[0].islower():
        return "lowercase_start"
    for prefix in config.bad_prefixes:
        if text.startswith(prefix):
            return "bad_prefix"
    if config.coofficial_words:
        hits = set()
        for word in _WORD_RE.findall(text):
            folded = word.casefold()
            if folded in config.coofficial_words:
                hits.add(folded)
                if len(hits) >= config.coofficial_min_hits:
                    return "coofficial_language"
    return None


def curate(corpus: Corpus, config: CurationConfig) -> tuple[Corpus, CurationReport]:
    """Clean a corpus, keeping only labeled documents that pass every rule.

    The dedup pass is sequential in insertion order so the first occurrence
    of a text is the one kept. Deterministic given the config.
    """
    report = CurationReport(input_count=len(corpus), topics_before=corpus.topic_index)
    drops = {rule: 0 for rule in RULE_ORDER}
    seen_texts: set[str] = set()
    kept: list[Document] = []

    for doc in corpus:
        if not doc.labels:
            drops["unlabeled"] += 1
            continue
        normalized = normalize_text(doc.text, config)
        rule = should_drop(
            Document(doc.id, normalized, doc.session, doc.labels, doc.extra),
            seen_texts,
            config,
        )
        if rule is not None:
            drops[rule] += 1
            continue
        seen_texts.add(normalized)
        kept.append(Document(doc.id, normalized, doc.session, doc.labels, dict(doc.extra)))

    if config.top_topics is not None:
        allowed = {t for t, _ in Corpus(kept).stats(config.top_topics)}
        filtered = []
        for doc in kept:
            labels = doc.labels & allowed
            if not labels:
                drops["topic_filter"] += 1
                continue
            filtered.append(Document(doc.id, doc.text, doc.session, labels, dict(doc.extra)))
        kept = filtered

    result = Corpus(kept)
    report.kept_count = len(result)
    report.drops = {rule: n for rule, n in drops.items() if n > 0}
    report.topics_after = result.topic_index
    return result, report
