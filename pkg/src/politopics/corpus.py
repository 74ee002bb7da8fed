"""Document / corpus data model and its line-delimited JSON serialization.

A corpus file is UTF-8, one JSON object per line (LF terminated) with fields
``id``, ``text``, optional ``session`` and ``labels`` (a list of
``"name_perspective"`` strings). Unknown fields are kept and written back on
round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import CorpusParseError, IntegrityError


@dataclass(frozen=True, order=True)
class TopicId:
    """A topic name plus the integer perspective it was annotated from."""

    name: str
    perspective: int = 1

    def __post_init__(self):
        if not self.name:
            raise IntegrityError("topic name must be non-empty")
        if self.perspective < 1:
            raise IntegrityError(f"perspective must be positive, got {self.perspective}")

    def __str__(self):
        return f"{self.name}_{self.perspective}"

    @classmethod
    def parse(cls, token: str) -> "TopicId":
        """Parse the ``name_perspective`` rendering, e.g. ``Health Policy_2``."""
        name, sep, suffix = token.rpartition("_")
        if sep and name and suffix.isdigit():
            return cls(name, int(suffix))
        raise IntegrityError(f"malformed topic id {token!r} (expected name_perspective)")


@dataclass
class Document:
    """One parliamentary-initiative text sample."""

    id: str
    text: str
    session: str | None = None
    labels: frozenset[TopicId] = frozenset()
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise IntegrityError("document id must be non-empty")
        self.labels = frozenset(self.labels)


class Corpus:
    """An ordered, immutable-after-construction collection of documents.

    Iteration order is insertion order; ``topic_index`` maps each TopicId to
    the number of documents carrying it.
    """

    def __init__(self, documents):
        self._documents = list(documents)
        self._by_id = {}
        index: dict[TopicId, int] = {}
        for doc in self._documents:
            if doc.id in self._by_id:
                raise IntegrityError(f"duplicate document id {doc.id!r}")
            self._by_id[doc.id] = doc
            for topic in doc.labels:
                index[topic] = index.get(topic, 0) + 1
        self._topic_index = index

    def __len__(self):
        return len(self._documents)

    def __iter__(self):
        return iter(self._documents)

    def __getitem__(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    @property
    def documents(self):
        return tuple(self._documents)

    @property
    def topic_index(self) -> dict[TopicId, int]:
        return dict(self._topic_index)

    def stats(self, top_n: int):
        """The ``top_n`` most frequent topics as (TopicId, count) pairs.

        Sorted by count descending; ties broken by topic name then
        perspective ascending.
        """
        if top_n < 1:
            raise ValueError(f"top_n must be >= 1, got {top_n}")
        ranked = sorted(self._topic_index.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:top_n]


def _doc_to_record(doc: Document) -> dict:
    record = dict(doc.extra)
    record["id"] = doc.id
    record["text"] = doc.text
    if doc.session is not None:
        record["session"] = doc.session
    record["labels"] = sorted(str(t) for t in doc.labels)
    return record


def _record_to_doc(record: dict, line_no: int) -> Document:
    if not isinstance(record, dict):
        raise CorpusParseError("record is not a JSON object", line_no)
    if "id" not in record:
        raise CorpusParseError("missing required field 'id'", line_no)
    if "text" not in record:
        raise CorpusParseError("missing required field 'text'", line_no)
    known = {"id", "text", "session", "labels"}
    try:
        labels = frozenset(TopicId.parse(t) for t in record.get("labels", []))
    except IntegrityError as exc:
        raise CorpusParseError(str(exc), line_no) from exc
    return Document(
        id=str(record["id"]),
        text=str(record["text"]),
        session=record.get("session"),
        labels=labels,
        extra={k: v for k, v in record.items() if k not in known},
    )


def read_corpus(path) -> Corpus:
    """Load a line-delimited JSON corpus file."""
    documents = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"invalid JSON ({exc.msg})", line_no) from exc
            doc = _record_to_doc(record, line_no)
            if doc.id in seen:
                raise IntegrityError(f"duplicate document id {doc.id!r} at line {line_no}")
            seen.add(doc.id)
            documents.append(doc)
    return Corpus(documents)


def write_corpus(corpus: Corpus, path) -> None:
    """Write a corpus as one JSON object per LF-terminated line."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps(_doc_to_record(doc), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
