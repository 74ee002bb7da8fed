"""Regex keyword engine assigning topic labels from expert rule files.

A rule file reuses the line-delimited JSON convention: one topic per line
with fields ``name``, ``perspective`` and ``patterns`` (literal words or
phrases). Matches are taken only at word boundaries, where a boundary is any
transition between a Unicode letter/digit and anything else, so a keyword
never fires inside a longer word ("vacuna" does not match "vacunación").
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field

from .corpus import TopicId
from .errors import CorpusParseError, RuleValidationError

# \w minus underscore: Unicode letters and digits only.
_WORD_CHAR = r"[^\W_]"


def strip_accents(text: str) -> str:
    """Remove combining marks (NFD decompose, drop Mn category)."""
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if unicodedata.category(ch) != "Mn")


@dataclass
class TopicRuleSet:
    """Keyword patterns per topic plus the matching configuration."""

    rules: dict[TopicId, list[str]]
    case_mode: str = "fold"
    accent_mode: str = "exact"

    def __post_init__(self):
        if self.case_mode not in ("fold", "exact"):
            raise RuleValidationError(f"unknown case_mode {self.case_mode!r}")
        if self.accent_mode not in ("fold", "exact"):
            raise RuleValidationError(f"unknown accent_mode {self.accent_mode!r}")
        for topic, patterns in self.rules.items():
            if not patterns:
                raise RuleValidationError(f"topic {topic} has no patterns")
            for pattern in patterns:
                if not pattern.strip():
                    raise RuleValidationError(f"topic {topic} has an empty pattern")


@dataclass
class CompiledMatcher:
    """Immutable compiled form of a TopicRuleSet; shareable across threads."""

    case_mode: str
    accent_mode: str
    _regexes: dict[TopicId, re.Pattern] = field(repr=False, default_factory=dict)

    def topics(self):
        return set(self._regexes)


def compile_rules(rules: TopicRuleSet) -> CompiledMatcher:
    """Compile each topic's patterns into one boundary-anchored alternation."""
    flags = re.UNICODE | (re.IGNORECASE if rules.case_mode == "fold" else 0)
    compiled = {}
    for topic, patterns in rules.rules.items():
        alternatives = []
        for pattern in patterns:
            pattern = pattern.strip()
            if rules.accent_mode == "fold":
                pattern = strip_accents(pattern)
            # Literal phrase; internal whitespace matches any whitespace run.
            tokens = [re.escape(tok) for tok in pattern.split()]
            alternatives.append(r"\s+".join(tokens))
        body = "|".join(f"(?:{alt})" for alt in alternatives)
        regex = re.compile(
            f"(?<!{_WORD_CHAR})(?:{body})(?!{_WORD_CHAR})", flags
        )
        compiled[topic] = regex
    return CompiledMatcher(rules.case_mode, rules.accent_mode, compiled)


def annotate(text: str, matcher: CompiledMatcher) -> frozenset[TopicId]:
    """All topics with at least one pattern occurrence in ``text``."""
    if matcher.accent_mode == "fold":
        text = strip_accents(text)
    return frozenset(
        topic for topic, regex in matcher._regexes.items() if regex.search(text)
    )


def read_rules(path, case_mode="fold", accent_mode="exact") -> TopicRuleSet:
    """Load a line-delimited JSON rule file."""
    rules: dict[TopicId, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"invalid JSON ({exc.msg})", line_no) from exc
            for key in ("name", "patterns"):
                if key not in record:
                    raise CorpusParseError(f"missing required field {key!r}", line_no)
            topic = TopicId(record["name"], int(record.get("perspective", 1)))
            if topic in rules:
                raise CorpusParseError(f"duplicate topic {topic}", line_no)
            rules[topic] = [str(p) for p in record["patterns"]]
    return TopicRuleSet(rules, case_mode=case_mode, accent_mode=accent_mode)


def write_rules(rules: TopicRuleSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic in sorted(rules.rules):
            record = {
                "name": topic.name,
                "perspective": topic.perspective,
                "patterns": rules.rules[topic],
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
