"""Command-line front end.

Subcommands mirror the pipeline stages and share file formats, so any
stage can be re-run on the previous stage's output:

    ingest    files/URLs          -> canonical post file (JSONL)
    classify  post file           -> labeled mentions (JSONL) + stats
    analyze   labeled mentions    -> counts.csv, series.csv, prediction.json
    report    series.csv          -> proportion.svg, slope.svg, profile.svg
    run       everything end to end into one output directory

`run` writes all artifacts to a temporary directory first and promotes
them only when every stage succeeded, so a failed run never leaves a
mixed set on disk.
"""

from __future__ import annotations

import argparse
import json
import logging
import shlex
import sys
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import forecast as fc
from . import ingest as ing
from . import report as rep
from .adapter_client import DEFAULT_TIMEOUT as ADAPTER_TIMEOUT_DEFAULT
from .adapter_client import HttpAdapter, StdioAdapter
from .classify import DEFAULT_BATCH_SIZE, Lexicon, classify_corpus
from .errors import ConfigError, TrustanError
from .sentences import AliasMap, corpus_sentences, filter_mentions, pipeline_stats
from .trends import bin_weekly, default_events, proportion_series, ratio_series, slope_series

log = logging.getLogger(__name__)

LEXICON_BUILTIN = "default"

ARTIFACTS = (
    "corpus.jsonl",
    "mentions.jsonl",
    "stats.json",
    "counts.csv",
    "series.csv",
    "prediction.json",
    "proportion.svg",
    "slope.svg",
    "profile.svg",
)


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    fetch_urls: list = field(default_factory=list)
    aliases: str | None = None
    lexicon: str | None = None
    adapter_cmd: str | None = None
    adapter_url: str | None = None
    min_n: int = 1
    alpha: float = 1.0
    window_weeks: int = fc.DEFAULT_WINDOW_WEEKS
    theta: float = fc.DEFAULT_THETA
    out: str = ""
    strict: bool = True
    timeout: float = ing.DEFAULT_FETCH_TIMEOUT
    retries: int = ing.DEFAULT_FETCH_RETRIES
    batch_size: int = DEFAULT_BATCH_SIZE
    adapter_timeout: float = ADAPTER_TIMEOUT_DEFAULT

    def validate(self) -> None:
        chosen = [x for x in (self.lexicon, self.adapter_cmd, self.adapter_url) if x]
        if len(chosen) != 1:
            raise ConfigError(
                "exactly one classifier must be selected "
                "(--lexicon, --adapter-cmd or --adapter-url)"
            )
        if not isinstance(self.inputs, list) or not isinstance(self.fetch_urls, list):
            raise ConfigError("inputs and fetch_urls must be lists of strings")
        if not self.inputs and not self.fetch_urls:
            raise ConfigError("no inputs: pass --input and/or --fetch-url")
        if not self.out:
            raise ConfigError("--out is required")
        if self.min_n < 1:
            raise ConfigError("--min-n must be >= 1")
        if self.alpha < 0:
            raise ConfigError("--alpha must be >= 0")
        if self.window_weeks < 2:
            raise ConfigError("--window-weeks must be >= 2")
        if self.theta < 0:
            raise ConfigError("--theta must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("--batch-size must be >= 1")

    @classmethod
    def from_sources(cls, args: argparse.Namespace, config_path: str | None) -> "RunConfig":
        """Config-file values first, then any flag given on the command line."""
        values: dict = {}
        if config_path:
            try:
                raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
            known = {f.name for f in fields(cls)}
            unknown = set(raw) - known
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            values.update(raw)
        for f in fields(cls):
            flag_value = getattr(args, f.name, None)
            if flag_value is not None:
                values[f.name] = flag_value
        cfg = cls(**values)
        cfg.validate()
        return cfg


@contextmanager
def _stage(name: str):
    """Tag any expected failure with the stage it happened in."""
    try:
        yield
    except TrustanError as exc:
        exc.args = (f"[{name}] {exc}",)
        raise
    except ValueError as exc:
        raise TrustanError(f"[{name}] {exc}") from exc


def build_classifier(cfg: RunConfig):
    if cfg.lexicon:
        if cfg.lexicon == LEXICON_BUILTIN:
            return Lexicon.default()
        return Lexicon.from_file(cfg.lexicon)
    if cfg.adapter_cmd:
        return StdioAdapter(shlex.split(cfg.adapter_cmd), timeout=cfg.adapter_timeout)
    return HttpAdapter(cfg.adapter_url, timeout=cfg.adapter_timeout)


def load_aliases(path: str | None) -> AliasMap:
    return AliasMap.from_file(path) if path else AliasMap.default()


def ingest_corpus(cfg: RunConfig) -> ing.Corpus:
    builder = ing.CorpusBuilder()
    for path in cfg.inputs:
        posts, skipped = ing.load_posts_file(path, strict=cfg.strict)
        builder.add_source(str(path), posts, skipped)
    for url in cfg.fetch_urls:
        posts = ing.fetch_thread(url, timeout=cfg.timeout, retries=cfg.retries)
        builder.add_source(url, posts)
    return builder.build()


def analyze_labels(labels, cfg: RunConfig):
    """Weekly counts, all five series kinds per entity, and the prediction."""
    counts = bin_weekly(labels)
    entities = sorted({c.entity_id for c in counts})
    series_list = []
    profiles = {}
    for entity in entities:
        entity_counts = [c for c in counts if c.entity_id == entity]
        trust = proportion_series(entity_counts, "trust", min_n=cfg.min_n)
        distrust = proportion_series(entity_counts, "distrust", min_n=cfg.min_n)
        ratio = ratio_series(entity_counts, alpha=cfg.alpha)
        profile = slope_series(ratio)
        series_list.extend([trust, distrust, slope_series(trust), ratio, profile])
        profiles[entity] = profile
    if len(entities) != 2:
        raise TrustanError(
            f"prediction needs mentions of exactly two entities, found {entities}"
        )
    verdicts = [
        fc.trend_verdict(profiles[e], window_weeks=cfg.window_weeks, theta=cfg.theta)
        for e in entities
    ]
    prediction = fc.predict_winner(verdicts)
    return counts, series_list, prediction


def emit_charts(series_list, outdir: Path) -> None:
    events = default_events()
    for kind in ("proportion", "slope", "profile"):
        rep.emit_chart_svg(series_list, events, kind, outdir / f"{kind}.svg")


def run_pipeline(cfg: RunConfig) -> Path:
    """Execute every stage; write all artifacts; promote atomically."""
    cfg.validate()
    outdir = Path(cfg.out)
    if outdir.exists() and not outdir.is_dir():
        raise ConfigError(f"--out {outdir} exists and is not a directory")
    outdir.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix=f".{outdir.name}-", dir=outdir.parent) as tmp:
        tmpdir = Path(tmp)

        with _stage("ingest"):
            corpus = ingest_corpus(cfg)
            ing.persist_corpus(corpus, tmpdir / "corpus.jsonl")

        with _stage("classify"):
            aliases = load_aliases(cfg.aliases)
            classifier = build_classifier(cfg)
            mentions = filter_mentions(corpus_sentences(corpus), aliases)
            try:
                labels = classify_corpus(mentions, classifier, batch_size=cfg.batch_size)
            finally:
                close = getattr(classifier, "close", None)
                if close:
                    close()
            rep.write_labeled_mentions(labels, tmpdir / "mentions.jsonl")
            _write_json(pipeline_stats(corpus, aliases), tmpdir / "stats.json")

        with _stage("analyze"):
            counts, series_list, prediction = analyze_labels(labels, cfg)
            rep.emit_counts_csv(counts, tmpdir / "counts.csv")
            rep.emit_series_csv(series_list, tmpdir / "series.csv")
            _write_json(prediction.to_dict(), tmpdir / "prediction.json")

        with _stage("report"):
            # plot from the emitted CSV, not the in-memory series: the chart
            # shows exactly the rows the table carries, and a staged
            # `report` run reproduces the same bytes
            emit_charts(rep.parse_series_csv(tmpdir / "series.csv"), tmpdir)

        outdir.mkdir(exist_ok=True)
        for name in ARTIFACTS:
            (tmpdir / name).replace(outdir / name)
    return outdir


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# --- argument parsing -------------------------------------------------------

def _add_ingest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", action="append", default=None, metavar="FILE",
                   help="canonical post file; repeatable")
    p.add_argument("--fetch-url", action="append", default=None, metavar="URL",
                   help="public thread-listing URL; repeatable")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=None,
                      help="fail on any malformed input line (default)")
    mode.add_argument("--lenient", dest="strict", action="store_false",
                      help="skip malformed lines, counting them")
    p.add_argument("--timeout", type=float, default=None,
                   help="HTTP timeout in seconds (default 30)")
    p.add_argument("--retries", type=int, default=None,
                   help="HTTP retry count for transient failures (default 3)")


def _add_classifier_flags(p: argparse.ArgumentParser, required: bool) -> None:
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--lexicon", nargs="?", const=LEXICON_BUILTIN, default=None,
                     metavar="FILE",
                     help="lexicon baseline; omit FILE to use the bundled cue file")
    grp.add_argument("--adapter-cmd", default=None, metavar="CMD",
                     help="external classifier command speaking trustan-adapter/1 on stdio")
    grp.add_argument("--adapter-url", default=None, metavar="URL",
                     help="external classifier HTTP endpoint")
    p.add_argument("--aliases", default=None, metavar="FILE",
                   help="entity alias map JSON (default: built-in TRUMP/HARRIS aliases)")
    p.add_argument("--batch-size", type=int, default=None,
                   help="adapter batch size (default 64)")
    p.add_argument("--adapter-timeout", type=float, default=None,
                   help="adapter response timeout per batch in seconds (default 60)")


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-n", type=int, default=None,
                   help="omit weeks with fewer mentions than this (default 1)")
    p.add_argument("--alpha", type=float, default=None,
                   help="additive smoothing for the trust:distrust ratio (default 1)")
    p.add_argument("--window-weeks", type=int, default=None,
                   help="trailing verdict window in weeks (default 4)")
    p.add_argument("--theta", type=float, default=None,
                   help="stability threshold in profile units per week (default 0.05)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustan",
        description="Weekly trust/distrust analytics over threaded discussions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load/fetch discussions into a canonical post file")
    _add_ingest_flags(p)
    p.add_argument("--out", "-o", required=True, metavar="FILE")

    p = sub.add_parser("classify", help="label entity mentions in a post file")
    p.add_argument("--corpus", required=True, metavar="FILE")
    _add_classifier_flags(p, required=True)
    p.add_argument("--out", "-o", required=True, metavar="FILE",
                   help="labeled mentions JSONL")
    p.add_argument("--stats", default=None, metavar="FILE",
                   help="also write a pipeline counts report")

    p = sub.add_parser("analyze", help="weekly series, metrics and prediction")
    p.add_argument("--mentions", required=True, metavar="FILE")
    _add_analysis_flags(p)
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("report", help="render charts from a series CSV")
    p.add_argument("--series", required=True, metavar="FILE")
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("run", help="full pipeline into one output directory")
    _add_ingest_flags(p)
    _add_classifier_flags(p, required=False)  # validated later so --config can supply it
    _add_analysis_flags(p)
    p.add_argument("--out", required=False, default=None, metavar="DIR")
    p.add_argument("--config", default=None, metavar="FILE",
                   help="JSON config with the same keys; flags override")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; the pipeline is deterministic")
    return parser


def _namespace_to_config(args: argparse.Namespace) -> RunConfig:
    ns = argparse.Namespace(**vars(args))
    ns.inputs = args.input
    ns.fetch_urls = args.fetch_url
    return RunConfig.from_sources(ns, getattr(args, "config", None))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args, parser)
    except ConfigError as exc:
        parser.error(str(exc))  # usage problem: exits 2
    except TrustanError as exc:
        print(f"trustan: error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.command == "ingest":
        cfg = RunConfig(
            inputs=args.input or [],
            fetch_urls=args.fetch_url or [],
            lexicon=LEXICON_BUILTIN,  # placeholder; not used by this stage
            out=args.out,
            strict=args.strict if args.strict is not None else True,
            timeout=args.timeout if args.timeout is not None else ing.DEFAULT_FETCH_TIMEOUT,
            retries=args.retries if args.retries is not None else ing.DEFAULT_FETCH_RETRIES,
        )
        if not cfg.inputs and not cfg.fetch_urls:
            parser.error("ingest needs --input and/or --fetch-url")
        with _stage("ingest"):
            corpus = ingest_corpus(cfg)
            ing.persist_corpus(corpus, args.out)
        print(f"wrote {len(corpus)} posts -> {args.out}")
        return 0

    if args.command == "classify":
        cfg = RunConfig(
            inputs=[args.corpus],
            aliases=args.aliases,
            lexicon=args.lexicon,
            adapter_cmd=args.adapter_cmd,
            adapter_url=args.adapter_url,
            out=args.out,
            batch_size=args.batch_size if args.batch_size is not None else DEFAULT_BATCH_SIZE,
            adapter_timeout=(args.adapter_timeout if args.adapter_timeout is not None
                             else ADAPTER_TIMEOUT_DEFAULT),
        )
        cfg.validate()
        with _stage("classify"):
            corpus = ing.load_corpus([args.corpus])
            aliases = load_aliases(cfg.aliases)
            classifier = build_classifier(cfg)
            mentions = filter_mentions(corpus_sentences(corpus), aliases)
            try:
                labels = classify_corpus(mentions, classifier, batch_size=cfg.batch_size)
            finally:
                close = getattr(classifier, "close", None)
                if close:
                    close()
            rep.write_labeled_mentions(labels, args.out)
            if args.stats:
                _write_json(pipeline_stats(corpus, aliases), Path(args.stats))
        print(f"labeled {len(labels)} mentions -> {args.out}")
        return 0

    if args.command == "analyze":
        cfg = RunConfig(
            inputs=[args.mentions], lexicon=LEXICON_BUILTIN, out=args.out,
            min_n=args.min_n if args.min_n is not None else 1,
            alpha=args.alpha if args.alpha is not None else 1.0,
            window_weeks=(args.window_weeks if args.window_weeks is not None
                          else fc.DEFAULT_WINDOW_WEEKS),
            theta=args.theta if args.theta is not None else fc.DEFAULT_THETA,
        )
        cfg.validate()
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with _stage("analyze"):
            labels = rep.read_labeled_mentions(args.mentions)
            counts, series_list, prediction = analyze_labels(labels, cfg)
            rep.emit_counts_csv(counts, outdir / "counts.csv")
            rep.emit_series_csv(series_list, outdir / "series.csv")
            _write_json(prediction.to_dict(), outdir / "prediction.json")
        print(f"prediction: {prediction.winner} -> {outdir / 'prediction.json'}")
        return 0

    if args.command == "report":
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with _stage("report"):
            series_list = rep.parse_series_csv(args.series)
            emit_charts(series_list, outdir)
        print(f"charts -> {outdir}")
        return 0

    # run
    cfg = _namespace_to_config(args)
    outdir = run_pipeline(cfg)
    prediction = json.loads((outdir / "prediction.json").read_text(encoding="utf-8"))
    print(f"prediction: {prediction['winner']}; artifacts -> {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
