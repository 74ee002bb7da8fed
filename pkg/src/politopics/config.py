"""Flat key-value pipeline configuration with section prefixes.

Format: one ``section.key=value`` per line; ``#`` starts a comment. No
nesting. Every key can be overridden by an environment variable named
``POLITOPICS_<KEY>`` with dots replaced by underscores (e.g.
``POLITOPICS_PATHS_CORPUS``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .curation import CurationConfig

ENV_PREFIX = "POLITOPICS_"


def parse_kv_file(path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def apply_env_overrides(values: dict[str, str], environ=None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    out = dict(values)
    known = {key.upper().replace(".", "_"): key for key in KNOWN_KEYS}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        suffix = name[len(ENV_PREFIX) :]
        if suffix in known:
            out[known[suffix]] = value
    return out


def _split_list(value: str) -> tuple:
    return tuple(part for part in (p.strip() for p in value.split(",")) if part)


KNOWN_KEYS = (
    "paths.corpus",
    "paths.rules",
    "paths.embeddings",
    "paths.models",
    "paths.reports",
    "curation.min_chars",
    "curation.bad_prefixes",
    "curation.coofficial_words",
    "curation.coofficial_min_hits",
    "curation.keep_punct",
    "curation.id_patterns",
    "curation.top_topics",
    "embed.dim",
    "embed.provider",
    "eval.k",
    "eval.head",
    "aggregation.policy",
    "seed",
    "jobs",
)


@dataclass
class PipelineConfig:
    paths: dict[str, str] = field(default_factory=dict)
    curation: CurationConfig = field(default_factory=CurationConfig)
    embed_dim: int = 768
    embed_provider: str = "hashed"
    k: int = 5
    head: str = "svm"
    head_overrides: dict[str, str] = field(default_factory=dict)  # topic-id str -> head
    aggregation_policy: str = "threshold:0.5"
    base_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")

    def head_for(self, topic) -> str:
        return self.head_overrides.get(str(topic), self.head)

    @classmethod
    def from_file(cls, path, environ=None) -> "PipelineConfig":
        values = apply_env_overrides(parse_kv_file(path), environ)
        return cls.from_values(values)

    @classmethod
    def from_values(cls, values: dict[str, str]) -> "PipelineConfig":
        curation_kwargs = {}
        if "curation.min_chars" in values:
            curation_kwargs["min_chars"] = int(values["curation.min_chars"])
        if "curation.bad_prefixes" in values:
            curation_kwargs["bad_prefixes"] = _split_list(values["curation.bad_prefixes"])
        if "curation.coofficial_words" in values:
            curation_kwargs["coofficial_words"] = frozenset(
                _split_list(values["curation.coofficial_words"])
            )
        if "curation.coofficial_min_hits" in values:
            curation_kwargs["coofficial_min_hits"] = int(
                values["curation.coofficial_min_hits"]
            )
        if "curation.keep_punct" in values:
            curation_kwargs["keep_punct"] = frozenset(values["curation.keep_punct"])
        if "curation.id_patterns" in values:
            # regexes may contain commas; separated by "||"
            curation_kwargs["id_patterns"] = tuple(
                p for p in values["curation.id_patterns"].split("||") if p
            )
        if values.get("curation.top_topics"):
            curation_kwargs["top_topics"] = int(values["curation.top_topics"])

        head_overrides = {
            key[len("head.") :]: value
            for key, value in values.items()
            if key.startswith("head.")
        }
        return cls(
            paths={
                key[len("paths.") :]: value
                for key, value in values.items()
                if key.startswith("paths.")
            },
            curation=CurationConfig(**curation_kwargs),
            embed_dim=int(values.get("embed.dim", 768)),
            embed_provider=values.get("embed.provider", "hashed"),
            k=int(values.get("eval.k", 5)),
            head=values.get("eval.head", "svm"),
            head_overrides=head_overrides,
            aggregation_policy=values.get("aggregation.policy", "threshold:0.5"),
            base_seed=int(values.get("seed", 0)),
            jobs=int(values.get("jobs", 1)),
        )
