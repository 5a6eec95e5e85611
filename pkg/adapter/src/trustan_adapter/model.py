"""Classifier backends: a deterministic keyword stub and an optional
transformer sequence classifier.

Both emit per-class scores in the model's index space; the configured
label map (class index -> canonical label) turns an argmax into one of
"support" / "attack" / "none".  The stub needs no downloads and is a
pure function of the input text, so the serving loop can be tested
hermetically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CANONICAL_LABELS = ("support", "attack", "none")

DEFAULT_LABEL_MAP = {0: "attack", 1: "none", 2: "support"}
DEFAULT_MAX_BATCH = 64

STUB_SUPPORT_KEYWORDS = frozenset(
    ["wise", "honest", "trustworthy", "competent", "sincere", "credible", "decent", "brave"]
)
STUB_ATTACK_KEYWORDS = frozenset(
    ["liar", "corrupt", "fraud", "crooked", "incompetent", "dishonest", "reckless", "phony"]
)

_WORD_RE = re.compile(r"[^\W\d_]+")


class AdapterSetupError(Exception):
    """Bad configuration or model load failure; the CLI exits nonzero."""


@dataclass
class AdapterConfig:
    model: str | None = None
    stub: bool = False
    label_map: dict = field(default_factory=lambda: dict(DEFAULT_LABEL_MAP))
    max_batch: int = DEFAULT_MAX_BATCH
    device: str | None = None

    def validate(self) -> None:
        if bool(self.model) == bool(self.stub):
            raise AdapterSetupError("select exactly one of --model or --stub")
        if self.max_batch < 1:
            raise AdapterSetupError("--max-batch must be >= 1")
        if sorted(self.label_map.values()) != sorted(CANONICAL_LABELS):
            raise AdapterSetupError(
                f"label map must be a bijection onto {CANONICAL_LABELS}, "
                f"got {self.label_map}"
            )
        if sorted(self.label_map.keys()) != list(range(3)):
            raise AdapterSetupError("label map keys must be class indices 0, 1, 2")


def apply_label_map(logits, label_map) -> str:
    """argmax over the class axis, then index -> canonical label."""
    best = max(range(len(logits)), key=lambda i: logits[i])
    return label_map[best]


class StubClassifier:
    """Keyword majority vote; equal support/attack counts fall back to none."""

    def __init__(self, config: AdapterConfig):
        self.config = config
        self._index_of = {label: idx for idx, label in config.label_map.items()}

    def logits(self, text: str) -> list[float]:
        words = set(_WORD_RE.findall(text.lower()))
        support = float(len(words & STUB_SUPPORT_KEYWORDS))
        attack = float(len(words & STUB_ATTACK_KEYWORDS))
        none = 0.5 if support != attack else max(support, attack) + 1.0
        out = [0.0, 0.0, 0.0]
        out[self._index_of["support"]] = support
        out[self._index_of["attack"]] = attack
        out[self._index_of["none"]] = none
        return out

    def classify(self, texts) -> list[tuple[str, float | None]]:
        results = []
        for text in texts:
            logits = self.logits(text)
            label = apply_label_map(logits, self.config.label_map)
            results.append((label, None))
        return results


class TransformerClassifier:
    """Wraps a fine-tuned 3-class sequence classifier; weights are user-supplied."""

    def __init__(self, config: AdapterConfig):
        self.config = config
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise AdapterSetupError(
                f"transformers/torch are required for --model: {exc}"
            ) from exc
        try:
            self._torch = torch
            self.tokenizer = AutoTokenizer.from_pretrained(config.model)
            self.model = AutoModelForSequenceClassification.from_pretrained(config.model)
        except Exception as exc:  # load failures come in many shapes
            raise AdapterSetupError(f"cannot load model {config.model!r}: {exc}") from exc
        if getattr(self.model.config, "num_labels", None) != 3:
            raise AdapterSetupError(
                f"model {config.model!r} has {self.model.config.num_labels} classes, need 3"
            )
        self.model.eval()
        if config.device:
            self.model.to(config.device)

    def classify(self, texts) -> list[tuple[str, float | None]]:
        torch = self._torch
        results = []
        with torch.no_grad():
            encoded = self.tokenizer(
                list(texts), return_tensors="pt", padding=True, truncation=True
            )
            if self.config.device:
                encoded = {k: v.to(self.config.device) for k, v in encoded.items()}
            probs = torch.softmax(self.model(**encoded).logits, dim=-1)
            for row in probs:
                label = apply_label_map(row.tolist(), self.config.label_map)
                results.append((label, float(row.max())))
        return results


def build_classifier(config: AdapterConfig):
    config.validate()
    return StubClassifier(config) if config.stub else TransformerClassifier(config)


def classify_batch(texts, classifier, max_batch: int) -> list[tuple[str, float | None]]:
    """Order-preserving classification, split into model-sized chunks."""
    texts = list(texts)
    results = []
    for start in range(0, len(texts), max_batch):
        results.extend(classifier.classify(texts[start : start + max_batch]))
    return results
