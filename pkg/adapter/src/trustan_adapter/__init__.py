"""Reference adapter serving ternary ethos labels over trustan-adapter/1."""

from .model import (
    CANONICAL_LABELS,
    DEFAULT_LABEL_MAP,
    AdapterConfig,
    AdapterSetupError,
    StubClassifier,
    apply_label_map,
    build_classifier,
    classify_batch,
)
from .serve import PROTOCOL_VERSION, serve_stdio

__version__ = "0.1.0"
