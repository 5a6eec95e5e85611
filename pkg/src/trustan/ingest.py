"""Canonical post stream: load, fetch, validate, persist.

Storage is one JSON object per line with exactly this shape:

    {"post_id": str, "thread_id": str, "author": str,
     "created_at": "YYYY-MM-DDTHH:MM:SSZ", "body": str}

All five keys are required, unknown keys are ignored, timestamps are UTC
with second precision.  A corpus always iterates sorted by
(created_at, post_id), so loading the same files twice is bit-stable and
persist/load is an identity.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests as _requests

from .errors import FetchError, IngestError

log = logging.getLogger(__name__)

TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"
REQUIRED_KEYS = ("post_id", "thread_id", "author", "created_at", "body")

USER_AGENT_ENV = "TRUSTAN_USER_AGENT"
DEFAULT_USER_AGENT = "trustan/0.1"
DEFAULT_FETCH_TIMEOUT = 30.0
DEFAULT_FETCH_RETRIES = 3


def parse_timestamp(raw: str) -> dt.datetime:
    """Strict canonical form only; anything else is rejected, never coerced."""
    try:
        ts = dt.datetime.strptime(raw, TIMESTAMP_FMT)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad timestamp {raw!r} (want YYYY-MM-DDTHH:MM:SSZ)") from exc
    return ts.replace(tzinfo=dt.timezone.utc)


def format_timestamp(ts: dt.datetime) -> str:
    return ts.astimezone(dt.timezone.utc).strftime(TIMESTAMP_FMT)


@dataclass(frozen=True)
class Post:
    post_id: str
    thread_id: str
    author: str
    created_at: dt.datetime
    body: str

    def __post_init__(self):
        if not self.post_id:
            raise ValueError("post_id must be non-empty")
        if self.created_at.tzinfo is None:
            raise ValueError("created_at must be timezone-aware UTC")

    def to_record(self) -> dict:
        return {
            "post_id": self.post_id,
            "thread_id": self.thread_id,
            "author": self.author,
            "created_at": format_timestamp(self.created_at),
            "body": self.body,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Post":
        if not isinstance(record, dict):
            raise ValueError("post record must be a JSON object")
        missing = [k for k in REQUIRED_KEYS if k not in record]
        if missing:
            raise ValueError(f"missing keys {missing}")
        for key in ("post_id", "thread_id", "author", "body"):
            if not isinstance(record[key], str):
                raise ValueError(f"{key} must be a string")
        return cls(
            post_id=record["post_id"],
            thread_id=record["thread_id"],
            author=record["author"],
            created_at=parse_timestamp(record["created_at"]),
            body=record["body"],
        )


@dataclass(frozen=True)
class SourceRecord:
    source: str
    post_count: int
    ingested_at: dt.datetime
    skipped: int = 0


@dataclass(frozen=True)
class Corpus:
    """Immutable, deterministically ordered collection of posts."""

    posts: tuple = ()
    source_manifest: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "posts", tuple(self.posts))
        object.__setattr__(self, "source_manifest", tuple(self.source_manifest))

    def __eq__(self, other):
        # manifest timestamps are wall-clock bookkeeping, not content
        return isinstance(other, Corpus) and self.posts == other.posts

    def __hash__(self):
        return hash(self.posts)

    def __len__(self):
        return len(self.posts)

    @property
    def skipped_total(self) -> int:
        return sum(s.skipped for s in self.source_manifest)


class CorpusBuilder:
    """Merges per-source post lists into a sorted, deduplicated Corpus.

    The merge is an order-independent set union: byte-identical duplicate
    posts collapse; the same post_id with different content is always an
    error because keeping either copy would make the result depend on
    source completion order.
    """

    def __init__(self):
        self._by_id: dict[str, Post] = {}
        self._manifest: list[SourceRecord] = []

    def add_source(self, source: str, posts, skipped: int = 0) -> None:
        count = 0
        for post in posts:
            count += 1
            prior = self._by_id.get(post.post_id)
            if prior is None:
                self._by_id[post.post_id] = post
            elif prior != post:
                raise IngestError(
                    f"{source}: post_id {post.post_id!r} already ingested with different content"
                )
        self._manifest.append(
            SourceRecord(source, count, dt.datetime.now(dt.timezone.utc), skipped)
        )

    def build(self) -> Corpus:
        ordered = sorted(self._by_id.values(), key=lambda p: (p.created_at, p.post_id))
        return Corpus(tuple(ordered), tuple(self._manifest))


def load_posts_file(path, strict: bool = True) -> tuple[list[Post], int]:
    """Parse one canonical post file; returns (posts, skipped-line count).

    strict: any malformed line is fatal, naming file and line number.
    lenient: malformed lines are skipped and counted.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"input file not found: {path}")
    posts, skipped = [], 0
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            posts.append(Post.from_record(json.loads(line)))
        except ValueError as exc:
            if strict:
                raise IngestError(f"{path}:{lineno}: {exc}") from exc
            skipped += 1
    if skipped:
        log.warning("%s: skipped %d malformed line(s)", path, skipped)
    return posts, skipped


def load_corpus(paths, strict: bool = True) -> Corpus:
    """Read canonical post files into one deterministic corpus."""
    builder = CorpusBuilder()
    for path in paths:
        posts, skipped = load_posts_file(path, strict=strict)
        builder.add_source(str(path), posts, skipped)
    return builder.build()


def persist_corpus(corpus: Corpus, path) -> None:
    """Write the canonical line-delimited form; load_corpus inverts this."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for post in corpus.posts:
                fh.write(json.dumps(post.to_record(), ensure_ascii=False,
                                    separators=(",", ":")) + "\n")
    except OSError as exc:
        raise IngestError(f"cannot write corpus to {path}: {exc}") from exc


# --- public thread JSON ingestion -----------------------------------------

def fetch_thread(
    url: str,
    timeout: float = DEFAULT_FETCH_TIMEOUT,
    retries: int = DEFAULT_FETCH_RETRIES,
    user_agent: str | None = None,
    session=None,
    sleep=time.sleep,
) -> list[Post]:
    """Fetch a public thread-listing JSON document and flatten it.

    Returns posts in depth-first tree order (submission first); the
    caller merges them into a Corpus, which re-sorts canonically.
    Rate limits and server errors are retried up to `retries` times,
    honoring a Retry-After header when one is sent; other client errors
    are fatal immediately.
    """
    ua = user_agent or os.environ.get(USER_AGENT_ENV) or DEFAULT_USER_AGENT
    http = session or _requests
    request_url = _normalize_thread_url(url)
    last_error = None
    for attempt in range(retries + 1):
        if attempt:
            sleep(_retry_delay(last_error, attempt))
        try:
            resp = http.get(request_url, headers={"User-Agent": ua}, timeout=timeout)
        except _requests.RequestException as exc:
            last_error = FetchError(f"fetch {request_url} failed: {exc}", retriable=True)
            continue
        if resp.status_code == 429 or resp.status_code >= 500:
            last_error = FetchError(
                f"fetch {request_url} returned status {resp.status_code}",
                status=resp.status_code,
                retriable=True,
            )
            last_error.retry_after = _parse_retry_after(resp)
            continue
        if not 200 <= resp.status_code < 300:
            raise FetchError(
                f"fetch {request_url} returned status {resp.status_code}",
                status=resp.status_code,
                retriable=False,
            )
        try:
            document = resp.json()
        except ValueError as exc:
            raise IngestError(f"{request_url}: response is not JSON: {exc}") from exc
        return flatten_thread(document, source=request_url)
    raise last_error


def _normalize_thread_url(url: str) -> str:
    if not url.startswith(("http://", "https://")):
        raise FetchError(f"not an HTTP(S) URL: {url!r}")
    base = url.split("?", 1)[0].rstrip("/")
    return base if base.endswith(".json") else base + ".json"


def _parse_retry_after(resp) -> float | None:
    try:
        return max(0.0, float(resp.headers.get("Retry-After")))
    except (TypeError, ValueError):
        return None


def _retry_delay(error, attempt: int) -> float:
    advised = getattr(error, "retry_after", None)
    return advised if advised is not None else 0.5 * (2 ** (attempt - 1))


def flatten_thread(document, source: str = "<thread>") -> list[Post]:
    """Depth-first flatten of a nested comment-tree listing into posts.

    The submission becomes the first post (title + body text); each
    comment node with a body becomes one post, deleted/empty bodies
    included.  Stub nodes without a body (collapsed "load more" entries)
    are skipped.
    """
    try:
        listings = [x for x in document if isinstance(x, dict)]
        children = listings[0]["data"]["children"]
        submission = next(c["data"] for c in children if c.get("kind") == "t3")
    except (TypeError, LookupError, StopIteration):
        raise IngestError(f"{source}: unrecognized thread document shape") from None

    thread_id = _require(submission, "id", source)
    posts = [
        Post(
            post_id=thread_id,
            thread_id=thread_id,
            author=submission.get("author") or "",
            created_at=_epoch_to_utc(_require(submission, "created_utc", source)),
            body=_submission_body(submission),
        )
    ]
    comment_children = []
    if len(listings) > 1:
        try:
            comment_children = listings[1]["data"]["children"]
        except (TypeError, LookupError):
            raise IngestError(f"{source}: unrecognized comment listing shape") from None
    for child in comment_children:
        _walk_comments(child, thread_id, source, posts)
    return posts


def _walk_comments(node, thread_id: str, source: str, out: list) -> None:
    if not isinstance(node, dict):
        raise IngestError(f"{source}: unrecognized comment node")
    data = node.get("data", {})
    if "body" not in data:  # "more" stubs and other bodyless nodes
        return
    out.append(
        Post(
            post_id=_require(data, "id", source),
            thread_id=thread_id,
            author=data.get("author") or "",
            created_at=_epoch_to_utc(_require(data, "created_utc", source)),
            body=data["body"] or "",
        )
    )
    replies = data.get("replies")
    if isinstance(replies, dict):
        for child in replies.get("data", {}).get("children", []):
            _walk_comments(child, thread_id, source, out)


def _require(data: dict, key: str, source: str):
    try:
        return data[key]
    except (TypeError, KeyError):
        raise IngestError(f"{source}: comment node missing {key!r}") from None


def _epoch_to_utc(epoch) -> dt.datetime:
    try:
        return dt.datetime.fromtimestamp(int(epoch), tz=dt.timezone.utc)
    except (TypeError, ValueError, OSError):
        raise IngestError(f"unparseable epoch timestamp {epoch!r}") from None


def _submission_body(data: dict) -> str:
    title = (data.get("title") or "").strip()
    selftext = (data.get("selftext") or "").strip()
    if title and selftext:
        return title + "\n\n" + selftext
    return title or selftext
