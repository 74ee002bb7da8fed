"""Embedding providers and the on-disk embedding store format.

Two providers: a deterministic hashed bag-of-words embedder (useful as a
backbone stand-in for tests and offline runs) and a reader for precomputed
transformer embedding files.

File format: UTF-8, first line a JSON header ``{"dim": D, "pooling": ...,
"model": ...}``, then one record per line: the document id followed by D
decimal numbers, space separated. Document ids in this format must not
contain whitespace.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmbeddingFormatError


@dataclass
class EmbeddingStore:
    """Fixed-dimension vectors keyed by document id, with provenance header."""

    dim: int
    pooling: str = "hashed"
    model_name: str = "hashed-bow"
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise EmbeddingFormatError(f"dim must be >= 1, got {self.dim}")

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, doc_id):
        return doc_id in self.vectors

    def get(self, doc_id: str) -> np.ndarray:
        return self.vectors[doc_id]

    def add(self, doc_id: str, vector) -> None:
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.dim,):
            raise EmbeddingFormatError(
                f"vector for {doc_id!r} has shape {vector.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(vector)):
            raise EmbeddingFormatError(f"vector for {doc_id!r} has non-finite entries")
        if doc_id in self.vectors:
            raise EmbeddingFormatError(f"duplicate document id {doc_id!r}")
        self.vectors[doc_id] = vector

    def matrix(self, doc_ids) -> np.ndarray:
        """Stack vectors for the given ids into an (n, dim) array."""
        return np.stack([self.vectors[doc_id] for doc_id in doc_ids])


def _token_index(token: str, dim: int, seed: int) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=str(seed).encode("ascii")
    ).digest()
    return int.from_bytes(digest, "big") % dim


def hashed_embed(text: str, dim: int = 768, seed: int = 0) -> np.ndarray:
    """L2-normalized token-count histogram under a seeded hash.

    Tokens are whitespace-separated and case-folded. Empty or
    whitespace-only text yields the zero vector.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    vector = np.zeros(dim, dtype=np.float64)
    for token in text.casefold().split():
        vector[_token_index(token, dim, seed)] += 1.0
    norm = np.linalg.norm(vector)
    if norm > 0:
        vector /= norm
    return vector


def embed_corpus(corpus, dim: int = 768, seed: int = 0) -> EmbeddingStore:
    """Hashed embeddings for every document in a corpus."""
    store = EmbeddingStore(dim=dim, pooling="hashed", model_name=f"hashed-bow-{seed}")
    for doc in corpus:
        store.add(doc.id, hashed_embed(doc.text, dim, seed))
    return store


def load_store(path) -> EmbeddingStore:
    """Read an embedding file, validating every record against the header."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise EmbeddingFormatError("missing header line")
        try:
            header = json.loads(header_line)
            dim = int(header["dim"])
            pooling = str(header["pooling"])
            model_name = str(header["model"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise EmbeddingFormatError(f"malformed header: {exc}") from exc
        store = EmbeddingStore(dim=dim, pooling=pooling, model_name=model_name)
        for index, line in enumerate(fh):
            if not line.strip():
                continue
            parts = line.split()
            doc_id, values = parts[0], parts[1:]
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"expected {dim} values, got {len(values)}", record_index=index
                )
            try:
                vector = np.array([float(v) for v in values])
            except ValueError as exc:
                raise EmbeddingFormatError(str(exc), record_index=index) from exc
            store.add(doc_id, vector)
    return store


def write_store(store: EmbeddingStore, path) -> None:
    """Write an embedding file with shortest-round-trip decimal values."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"dim": store.dim, "pooling": store.pooling, "model": store.model_name}
        fh.write(json.dumps(header, ensure_ascii=False))
        fh.write("\n")
        for doc_id, vector in store.vectors.items():
            if any(ch.isspace() for ch in doc_id):
                raise EmbeddingFormatError(
                    f"document id {doc_id!r} contains whitespace, not representable"
                )
            fh.write(doc_id)
            for value in vector:
                fh.write(" ")
                fh.write(repr(float(value)))
            fh.write("\n")
