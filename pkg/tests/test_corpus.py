import json

import numpy as np
import pytest

from politopics.corpus import Corpus, Document, TopicId, read_corpus, write_corpus
from politopics.errors import CorpusParseError, IntegrityError

from synthdata import make_docs


def test_topic_id_rendering_and_parse():
    topic = TopicId("Health Policy", 2)
    assert str(topic) == "Health Policy_2"
    assert TopicId.parse("Health Policy_2") == topic


def test_topic_id_invalid():
    with pytest.raises(IntegrityError):
        TopicId.parse("no-perspective-suffix")
    with pytest.raises(IntegrityError):
        TopicId("x", 0)


def test_round_trip_identity(tmp_path, tiny_corpus):
    path = tmp_path / "corpus.jsonl"
    write_corpus(tiny_corpus, path)
    loaded = read_corpus(path)
    assert [d.id for d in loaded] == [d.id for d in tiny_corpus]
    assert [d.text for d in loaded] == [d.text for d in tiny_corpus]
    assert [d.labels for d in loaded] == [d.labels for d in tiny_corpus]
    # a second write is byte-identical
    path2 = tmp_path / "again.jsonl"
    write_corpus(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_unknown_fields_preserved(tmp_path):
    path = tmp_path / "corpus.jsonl"
    record = {"id": "a", "text": "hola", "labels": [], "source": "BOE"}
    path.write_text(json.dumps(record) + "\n", encoding="utf-8")
    corpus = read_corpus(path)
    assert corpus["a"].extra == {"source": "BOE"}
    out = tmp_path / "out.jsonl"
    write_corpus(corpus, out)
    assert json.loads(out.read_text())["source"] == "BOE"


def test_missing_id_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a", "text": "x", "labels": []}\n{"text": "y"}\n')
    with pytest.raises(CorpusParseError, match="line 2"):
        read_corpus(path)


def test_malformed_json_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a", "text": "x"}\nnot json\n')
    with pytest.raises(CorpusParseError, match="line 2"):
        read_corpus(path)


def test_duplicate_id_rejected(tmp_path):
    path = tmp_path / "dup.jsonl"
    path.write_text('{"id": "doc1", "text": "x"}\n{"id": "doc1", "text": "y"}\n')
    with pytest.raises(IntegrityError, match="doc1"):
        read_corpus(path)
    with pytest.raises(IntegrityError):
        Corpus(make_docs([("doc1", "x", []), ("doc1", "y", [])]))


def test_stats_counts_and_tiebreak():
    corpus = Corpus(
        make_docs(
            [
                ("1", "t", ["A_1"]),
                ("2", "t2", ["A_1", "B_1"]),
                ("3", "t3", ["B_1", "C_1"]),
            ]
        )
    )
    assert corpus.stats(30) == [
        (TopicId("A", 1), 2),
        (TopicId("B", 1), 2),
        (TopicId("C", 1), 1),
    ]
    assert corpus.stats(1) == [(TopicId("A", 1), 2)]
    with pytest.raises(ValueError):
        corpus.stats(0)


def test_stats_empty_corpus():
    assert Corpus([]).stats(30) == []


def test_topic_index_matches_brute_force_recount():
    rng = np.random.Generator(np.random.PCG64(7))
    topics = [TopicId(f"T{i}", 1) for i in range(6)]
    docs = []
    for i in range(200):
        labels = frozenset(t for t in topics if rng.random() < 0.3)
        docs.append(Document(f"d{i}", "texto", labels=labels))
    corpus = Corpus(docs)
    labeled = sum(1 for d in corpus if d.labels)
    assert sum(corpus.topic_index.values()) >= labeled or labeled == 0
    for topic in topics:
        recount = sum(1 for d in corpus if topic in d.labels)
        assert corpus.topic_index.get(topic, 0) == recount
