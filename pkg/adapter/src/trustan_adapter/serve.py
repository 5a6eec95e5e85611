"""The stdio serving loop for trustan-adapter/1.

    first line out   {"protocol": "trustan-adapter/1"}
    request line in  {"id": int, "text": str}
    response line    {"id": int, "label": str, "confidence": float?}

A blank input line flushes: every id received since the previous flush
is answered (in arrival order) before any further line is read.  A
malformed request line yields {"id": null, "error": ...} and the loop
continues.  EOF answers any still-pending requests and exits cleanly.
"""

from __future__ import annotations

import json
import sys

from .model import AdapterConfig, build_classifier, classify_batch

PROTOCOL_VERSION = "trustan-adapter/1"


def _parse_request(line: str):
    """Returns (id, text) or raises ValueError with a wire-safe message."""
    try:
        obj = json.loads(line)
    except ValueError:
        raise ValueError("request line is not valid JSON") from None
    if not isinstance(obj, dict):
        raise ValueError("request must be a JSON object")
    if "id" not in obj:
        raise ValueError("request missing 'id'")
    if not isinstance(obj["id"], int) or isinstance(obj["id"], bool):
        raise ValueError("request 'id' must be an integer")
    if "text" not in obj:
        raise ValueError("request missing 'text'")
    if not isinstance(obj["text"], str):
        raise ValueError("request 'text' must be a string")
    return obj["id"], obj["text"]


def serve_stdio(config: AdapterConfig, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    classifier = build_classifier(config)

    def emit(obj):
        stdout.write(json.dumps(obj) + "\n")
        stdout.flush()

    emit({"protocol": PROTOCOL_VERSION})

    pending: list[tuple[int, str]] = []

    def flush():
        if not pending:
            return
        results = classify_batch(
            [text for _, text in pending], classifier, config.max_batch
        )
        for (request_id, _), (label, confidence) in zip(pending, results):
            response = {"id": request_id, "label": label}
            if confidence is not None:
                response["confidence"] = confidence
            emit(response)
        pending.clear()

    for raw in stdin:
        line = raw.rstrip("\n")
        if not line.strip():
            flush()
            continue
        try:
            pending.append(_parse_request(line))
        except ValueError as exc:
            emit({"id": None, "error": str(exc)})
    flush()  # EOF: every received request still gets its answer
    return 0
