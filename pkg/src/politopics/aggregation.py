"""Combine per-topic detector scores into a final multi-label prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import TopicId


@dataclass
class TopicScoreSet:
    doc_id: str
    scores: dict[TopicId, float] = field(default_factory=dict)

    def __post_init__(self):
        for topic, score in self.scores.items():
            if not (math.isfinite(score) and 0.0 <= score <= 1.0):
                raise ValueError(f"score for {topic} out of [0, 1]: {score}")


@dataclass
class AggregationPolicy:
    """Either a fixed score threshold or a top-k rank cut."""

    kind: str = "threshold"
    tau: float = 0.5
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("threshold", "top_k"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "threshold" and not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.kind == "top_k" and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    @classmethod
    def parse(cls, text: str) -> "AggregationPolicy":
        """Parse "threshold:0.5" or "topk:3"."""
        kind, _, value = text.partition(":")
        if kind == "threshold":
            return cls("threshold", tau=float(value or 0.5))
        if kind in ("topk", "top_k"):
            return cls("top_k", k=int(value or 1))
        raise ValueError(f"cannot parse aggregation policy {text!r}")


@dataclass
class AggregationResult:
    topics: list[tuple[TopicId, float]]
    truncated: bool = False


def aggregate(scores: TopicScoreSet, policy: AggregationPolicy) -> AggregationResult:
    """Selected topics sorted by score descending, ties by topic id ascending.

    Threshold keeps every topic with score >= tau (closed bound, so tau=1.0
    can still select perfect-confidence topics). Top-k keeps the k highest;
    if k exceeds the number of topics the result is flagged truncated.
    """
    ranked = sorted(scores.scores.items(), key=lambda kv: (-kv[1], kv[0]))
    if policy.kind == "threshold":
        return AggregationResult([(t, s) for t, s in ranked if s >= policy.tau])
    truncated = policy.k > len(ranked)
    return AggregationResult(ranked[: policy.k], truncated=truncated)
