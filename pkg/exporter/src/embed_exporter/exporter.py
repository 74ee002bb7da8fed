"""Batch transformer inference over a corpus file.

The output is the embedding file consumed by the politopics pipeline: a JSON
header line with ``dim``, ``pooling``, and ``model``, then one record per
document. Documents longer than the token budget are truncated and noted in a
sidecar log, one JSON object per line.
"""

import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

log = logging.getLogger(__name__)

POOLINGS = ("cls", "mean")
PADDING_SIDES = ("left", "right")

# Families without a [CLS]-style first token; "cls" pooling for these takes
# the last non-padding position instead.
DECODER_MODEL_TYPES = frozenset({"gpt2", "gpt_neo", "gptj", "llama", "opt"})


@dataclass
class ExportConfig:
    model: str
    pooling: str = "cls"
    max_tokens: int = 512
    padding_side: str | None = None
    batch_size: int = 8

    def __post_init__(self):
        if self.pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}, got {self.pooling!r}")
        if self.padding_side is not None and self.padding_side not in PADDING_SIDES:
            raise ValueError(
                f"padding_side must be one of {PADDING_SIDES}, got {self.padding_side!r}"
            )
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


@dataclass
class ExportResult:
    dim: int
    exported: int
    truncated: list[str] = field(default_factory=list)


def read_documents(corpus_path):
    """Yield (id, text) pairs from a JSONL corpus file."""
    with open(corpus_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                doc_id = str(record["id"])
                text = str(record["text"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"line {line_no}: malformed corpus record: {exc}") from exc
            if any(ch.isspace() for ch in doc_id):
                raise ValueError(f"line {line_no}: document id {doc_id!r} contains whitespace")
            yield doc_id, text


def is_decoder_family(config) -> bool:
    return config.model_type in DECODER_MODEL_TYPES or getattr(config, "is_decoder", False)


def pool_hidden_states(hidden, mask, pooling, decoder=False):
    """Reduce per-token states (batch, seq, dim) to one vector per sequence.

    cls: first non-padding position for encoders, last for decoders.
    mean: average over non-padding positions.
    """
    mask = mask.to(hidden.dtype)
    if pooling == "mean":
        total = (hidden * mask.unsqueeze(-1)).sum(dim=1)
        return total / mask.sum(dim=1, keepdim=True)
    lengths = mask.long().sum(dim=1)
    rows = torch.arange(hidden.shape[0], device=hidden.device)
    # padded positions sit on the right after the gather index is computed
    first = mask.long().argmax(dim=1)
    index = first + lengths - 1 if decoder else first
    return hidden[rows, index]


def export(corpus_path, config: ExportConfig, out_path, log_path=None) -> ExportResult:
    """Embed every document and write the embedding file atomically."""
    tokenizer = AutoTokenizer.from_pretrained(config.model)
    model = AutoModel.from_pretrained(config.model, torch_dtype=torch.float32)
    model.eval()
    decoder = is_decoder_family(model.config)
    if config.padding_side is not None:
        tokenizer.padding_side = config.padding_side
    if tokenizer.pad_token is None:
        tokenizer.pad_token = tokenizer.eos_token or tokenizer.unk_token

    window = getattr(model.config, "max_position_embeddings", None)
    if window is not None and config.max_tokens > window:
        raise ValueError(
            f"max_tokens {config.max_tokens} exceeds model context window {window}"
        )

    dim = int(model.config.hidden_size)
    result = ExportResult(dim=dim, exported=0)
    documents = list(read_documents(corpus_path))
    if log_path is None:
        log_path = str(out_path) + ".log"

    stage = str(out_path) + ".stage"
    with open(stage, "w", encoding="utf-8") as out, open(
        log_path, "w", encoding="utf-8"
    ) as sidecar:
        header = {"dim": dim, "pooling": config.pooling, "model": config.model}
        out.write(json.dumps(header, ensure_ascii=False))
        out.write("\n")
        with torch.inference_mode():
            for start in range(0, len(documents), config.batch_size):
                batch = documents[start : start + config.batch_size]
                texts = [text for _, text in batch]
                full = tokenizer(texts, add_special_tokens=True)["input_ids"]
                encoded = tokenizer(
                    texts,
                    add_special_tokens=True,
                    truncation=True,
                    max_length=config.max_tokens,
                    padding=True,
                    return_tensors="pt",
                )
                hidden = model(**encoded).last_hidden_state.to(torch.float32)
                vectors = pool_hidden_states(
                    hidden, encoded["attention_mask"], config.pooling, decoder
                )
                for (doc_id, _), tokens, vector in zip(batch, full, vectors):
                    if len(tokens) > config.max_tokens:
                        result.truncated.append(doc_id)
                        sidecar.write(
                            json.dumps({"id": doc_id, "tokens": len(tokens),
                                        "kept": config.max_tokens})
                        )
                        sidecar.write("\n")
                    values = np.asarray(vector, dtype=np.float64)
                    out.write(doc_id)
                    for value in values:
                        out.write(" ")
                        out.write(repr(float(value)))
                    out.write("\n")
                    result.exported += 1
    os.replace(stage, out_path)
    log.info("exported %d vectors (dim %d), %d truncated",
             result.exported, dim, len(result.truncated))
    return result
