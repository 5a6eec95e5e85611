"""Ternary ethos labeling: support / attack / none.

Two classifier routes fulfill the same contract: a deterministic
lexicon baseline (cue-phrase counting, shipped as an auditable JSON
file) and a client for external model adapters speaking the
trustan-adapter/1 protocol.  Downstream analytics read SUPPORT as trust
and ATTACK as distrust.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import AdapterProtocolError, ConfigError
from .sentences import MentionSentence, compile_word_matcher

DEFAULT_BATCH_SIZE = 64


class EthosLabel(enum.Enum):
    SUPPORT = "support"
    ATTACK = "attack"
    NONE = "none"

    @property
    def wire(self) -> str:
        return self.value

    @classmethod
    def from_wire(cls, s: str) -> "EthosLabel":
        # case-sensitive on purpose: "Support" is a protocol violation
        for member in cls:
            if member.value == s:
                return member
        raise ValueError(f"unknown ethos label {s!r}")


@dataclass(frozen=True)
class LabeledMention:
    mention: MentionSentence
    label: EthosLabel
    confidence: float | None
    classifier_id: str

    def __post_init__(self):
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence!r} outside [0, 1]")
        if not self.classifier_id:
            raise ValueError("classifier_id must be non-empty")


class Lexicon:
    """Disjoint support and attack cue-phrase sets, lowercase."""

    def __init__(self, support_cues, attack_cues):
        support = frozenset(c.strip().lower() for c in support_cues)
        attack = frozenset(c.strip().lower() for c in attack_cues)
        if "" in support or "" in attack:
            raise ConfigError("lexicon cues must be non-empty")
        overlap = support & attack
        if overlap:
            raise ConfigError(f"cues in both polarities: {sorted(overlap)}")
        self.support_cues = support
        self.attack_cues = attack
        self._support_matchers = [compile_word_matcher([c]) for c in sorted(support)]
        self._attack_matchers = [compile_word_matcher([c]) for c in sorted(attack)]

    @classmethod
    def from_file(cls, path) -> "Lexicon":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read lexicon {path}: {exc}") from exc
        if not isinstance(raw, dict) or "support" not in raw or "attack" not in raw:
            raise ConfigError(f'lexicon {path} must be {{"support": [...], "attack": [...]}}')
        return cls(raw["support"], raw["attack"])

    @classmethod
    def default(cls) -> "Lexicon":
        raw = json.loads(
            resources.files("trustan").joinpath("data/lexicon.json").read_text("utf-8")
        )
        return cls(raw["support"], raw["attack"])

    def hits(self, text: str) -> tuple[int, int]:
        """(support, attack) whole-word cue occurrences, counted per cue."""
        lowered = text.lower()
        s = sum(len(m.findall(lowered)) for m in self._support_matchers)
        a = sum(len(m.findall(lowered)) for m in self._attack_matchers)
        return s, a


def classify_lexicon(mention: MentionSentence, lexicon: Lexicon) -> LabeledMention:
    """Majority cue polarity wins; zero hits or an exact tie is NONE.

    Confidence is majority hits over total hits, absent for the zero-hit
    case (a tie therefore carries confidence 0.5).
    """
    s, a = lexicon.hits(mention.sentence.text)
    if s == a == 0:
        return LabeledMention(mention, EthosLabel.NONE, None, "lexicon")
    if a > s:
        label = EthosLabel.ATTACK
    elif s > a:
        label = EthosLabel.SUPPORT
    else:
        label = EthosLabel.NONE
    return LabeledMention(mention, label, max(s, a) / (s + a), "lexicon")


def classify_external(batch, adapter) -> list[LabeledMention]:
    """One labeled mention per input via an adapter, restored to input order.

    Requests are numbered 0..n-1 within the batch; the adapter may answer
    in any order but must answer every id exactly once with a canonical
    label string.
    """
    batch = list(batch)
    if not batch:
        return []
    requests = [{"id": i, "text": m.sentence.text} for i, m in enumerate(batch)]
    responses = adapter.submit(requests)

    by_id: dict[int, dict] = {}
    for resp in responses:
        if not isinstance(resp, dict) or "id" not in resp:
            raise AdapterProtocolError(f"malformed adapter response: {resp!r}")
        if "error" in resp:
            raise AdapterProtocolError(f"adapter error for id {resp['id']}: {resp['error']}")
        rid = resp["id"]
        if not isinstance(rid, int) or not 0 <= rid < len(batch):
            raise AdapterProtocolError(f"adapter answered unknown id {rid!r}")
        if rid in by_id:
            raise AdapterProtocolError(f"adapter answered id {rid} twice")
        by_id[rid] = resp
    missing = [i for i in range(len(batch)) if i not in by_id]
    if missing:
        raise AdapterProtocolError(f"adapter left ids unanswered: {missing}")

    out = []
    for i, mention in enumerate(batch):
        resp = by_id[i]
        try:
            label = EthosLabel.from_wire(resp.get("label"))
        except ValueError:
            raise AdapterProtocolError(
                f"adapter returned non-canonical label {resp.get('label')!r} for id {i}"
            ) from None
        confidence = resp.get("confidence")
        if confidence is not None:
            try:
                confidence = float(confidence)
            except (TypeError, ValueError):
                raise AdapterProtocolError(
                    f"adapter returned non-numeric confidence for id {i}"
                ) from None
            if not 0.0 <= confidence <= 1.0:
                raise AdapterProtocolError(
                    f"adapter confidence {confidence} outside [0, 1] for id {i}"
                )
        out.append(LabeledMention(mention, label, confidence, adapter.classifier_id))
    return out


def classify_corpus(mentions, classifier, batch_size: int = DEFAULT_BATCH_SIZE) -> list[LabeledMention]:
    """Label every mention with the lexicon baseline or an external adapter.

    Results are per-mention, so batch partitioning cannot change them.
    """
    mentions = list(mentions)
    if isinstance(classifier, Lexicon):
        return [classify_lexicon(m, classifier) for m in mentions]
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    labels: list[LabeledMention] = []
    for start in range(0, len(mentions), batch_size):
        labels.extend(classify_external(mentions[start : start + batch_size], classifier))
    return labels
