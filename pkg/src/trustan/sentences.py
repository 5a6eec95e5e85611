"""Sentence splitting and candidate-name filtering.

Splitting is deliberately naive: post bodies are cut at runs of the
terminator characters ``.``, ``!`` and ``?`` with no abbreviation
handling, so "U.S." yields two fragments.  That known artifact is the
price of an auditable one-line rule.  A trailing unterminated fragment
is kept as a sentence.
"""

from __future__ import annotations

import datetime as dt
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

# A fragment is either text up to and including a terminator run, or the
# trailing unterminated text.  findall covers every character exactly once.
_FRAGMENT_RE = re.compile(r"[^.!?]*[.!?]+|[^.!?]+")

# Matching is whole-word: the character before and after an alias hit must
# not be a letter (digits, punctuation and string edges all count as
# boundaries).  [^\W\d_] is "Unicode letter" in re terms.
_BOUNDARY_L = r"(?<![^\W\d_])"
_BOUNDARY_R = r"(?![^\W\d_])"

DEFAULT_ALIASES = {
    "TRUMP": ("trump", "donald trump"),
    "HARRIS": ("harris", "kamala", "kamala harris"),
}


@dataclass(frozen=True)
class Sentence:
    """One sentence fragment of a post, with its position and timestamp."""

    sentence_id: str
    post_id: str
    ordinal: int
    created_at: dt.datetime
    text: str

    def __post_init__(self):
        if not self.text or self.text != self.text.strip():
            raise ValueError("sentence text must be non-empty and trimmed")


@dataclass(frozen=True)
class MentionSentence:
    """A sentence paired with one tracked entity it names."""

    sentence: Sentence
    entity_id: str


def compile_word_matcher(phrases) -> re.Pattern:
    """Case-insensitive whole-word matcher for a set of lowercase phrases."""
    alts = sorted((re.escape(p) for p in phrases), key=len, reverse=True)
    return re.compile(_BOUNDARY_L + "(?:" + "|".join(alts) + ")" + _BOUNDARY_R)


class AliasMap:
    """entity_id -> alias phrases; every alias belongs to exactly one entity."""

    def __init__(self, entries: dict):
        cleaned: dict[str, tuple[str, ...]] = {}
        seen: dict[str, str] = {}
        for entity, aliases in entries.items():
            aliases = tuple(dict.fromkeys(a.strip().lower() for a in aliases))
            if not entity or not aliases or any(not a for a in aliases):
                raise ConfigError(f"entity {entity!r} needs at least one non-empty alias")
            for a in aliases:
                if a in seen:
                    raise ConfigError(f"alias {a!r} claimed by both {seen[a]} and {entity}")
                seen[a] = entity
            cleaned[entity] = aliases
        self.entries = cleaned
        self._matchers = {
            entity: compile_word_matcher(aliases) for entity, aliases in cleaned.items()
        }

    @classmethod
    def default(cls) -> "AliasMap":
        return cls(DEFAULT_ALIASES)

    @classmethod
    def from_file(cls, path) -> "AliasMap":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read alias map {path}: {exc}") from exc
        if not isinstance(raw, dict) or not all(isinstance(v, list) for v in raw.values()):
            raise ConfigError(f"alias map {path} must map entity_id -> [aliases]")
        return cls(raw)

    def entities(self) -> list[str]:
        return sorted(self.entries)

    def entities_in(self, text: str) -> list[str]:
        lowered = text.lower()
        return [e for e in self.entities() if self._matchers[e].search(lowered)]


def split_sentences(body: str) -> list[str]:
    """Split text at runs of . ! ? keeping each trailing terminator run.

    Fragments that are empty after trimming are dropped; everything else
    survives, so the non-whitespace characters of the input are conserved.
    """
    return [frag for frag in (m.strip() for m in _FRAGMENT_RE.findall(body)) if frag]


def post_sentences(post) -> list[Sentence]:
    """Sentences of one post, ordinal-numbered in reading order."""
    return [
        Sentence(f"{post.post_id}#{i}", post.post_id, i, post.created_at, text)
        for i, text in enumerate(split_sentences(post.body))
    ]


def corpus_sentences(corpus) -> list[Sentence]:
    out = []
    for post in corpus.posts:
        out.extend(post_sentences(post))
    return out


def filter_mentions(sentences, aliases: AliasMap) -> list[MentionSentence]:
    """One record per (sentence, entity) pair where any alias matches.

    A sentence naming both candidates yields two records, classified
    independently downstream.  Order: input order, then entity_id.
    """
    out = []
    for sentence in sentences:
        for entity in aliases.entities_in(sentence.text):
            out.append(MentionSentence(sentence, entity))
    return out


def pipeline_stats(corpus, aliases: AliasMap) -> dict:
    """Counting report: posts, sentences, and mention volume per entity."""
    sentences = corpus_sentences(corpus)
    mentions = filter_mentions(sentences, aliases)
    by_entity = {entity: 0 for entity in aliases.entities()}
    for m in mentions:
        by_entity[m.entity_id] += 1
    return {
        "posts": len(corpus.posts),
        "sentences": len(sentences),
        "mentions_by_entity": by_entity,
        "mention_records": len(mentions),
        "mention_sentences": len({m.sentence.sentence_id for m in mentions}),
    }
