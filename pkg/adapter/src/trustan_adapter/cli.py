"""Command line for the adapter process."""

from __future__ import annotations

import argparse
import json
import sys

from .model import (
    DEFAULT_LABEL_MAP,
    DEFAULT_MAX_BATCH,
    AdapterConfig,
    AdapterSetupError,
)
from .serve import serve_stdio


def parse_label_map(raw: str) -> dict:
    try:
        obj = json.loads(raw)
        return {int(k): v for k, v in obj.items()}
    except (ValueError, TypeError, AttributeError) as exc:
        raise AdapterSetupError(f"bad --label-map {raw!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustan-adapter",
        description="Serve a ternary ethos classifier over stdio (trustan-adapter/1).",
    )
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", default=None, metavar="PATH_OR_ID",
                       help="fine-tuned 3-class sequence classifier to load")
    group.add_argument("--stub", action="store_true",
                       help="deterministic keyword heuristic; no model download")
    parser.add_argument("--label-map", default=None, metavar="JSON",
                        help='class index -> label, e.g. \'{"0":"attack","1":"none","2":"support"}\'')
    parser.add_argument("--max-batch", type=int, default=DEFAULT_MAX_BATCH,
                        help="internal inference batch size (default 64)")
    parser.add_argument("--device", default=None, help="device hint, e.g. cpu or cuda")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = AdapterConfig(
            model=args.model,
            stub=args.stub,
            label_map=(parse_label_map(args.label_map) if args.label_map
                       else dict(DEFAULT_LABEL_MAP)),
            max_batch=args.max_batch,
            device=args.device,
        )
        config.validate()
        return serve_stdio(config)
    except AdapterSetupError as exc:
        print(f"trustan-adapter: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
