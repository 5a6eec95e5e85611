"""Transports for the trustan-adapter/1 classifier protocol.

Wire format, line-delimited JSON:

    adapter announces   {"protocol": "trustan-adapter/1"}
    request line        {"id": int, "text": str}
    response line       {"id": int, "label": "support"|"attack"|"none",
                         "confidence": float optional}

A blank line flushes a batch; the adapter must answer every id received
before the flush.  The same payloads travel over HTTP POST: the batch is
the request body (NDJSON), the response body holds the response lines.

Both transports expose submit(requests) -> list of response dicts and a
classifier_id; semantic validation (id bookkeeping, label strings) lives
in classify.classify_external so that test fakes are validated the same
way as real adapters.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import threading
import time

import requests as _requests

from .errors import AdapterCrash, AdapterProtocolError, AdapterTimeout

PROTOCOL_VERSION = "trustan-adapter/1"
DEFAULT_TIMEOUT = 60.0


class StdioAdapter:
    """Drives an adapter subprocess over stdin/stdout."""

    def __init__(self, cmd, timeout: float = DEFAULT_TIMEOUT):
        if isinstance(cmd, str):
            cmd = shlex.split(cmd)
        if not cmd:
            raise AdapterProtocolError("empty adapter command")
        self.cmd = list(cmd)
        self.timeout = timeout
        self.classifier_id = f"adapter-cmd:{os.path.basename(self.cmd[0])}"
        self._proc = None
        self._lines: queue.Queue = queue.Queue()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.close()

    def start(self):
        if self._proc is not None:
            return
        try:
            self._proc = subprocess.Popen(
                self.cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise AdapterCrash(f"cannot start adapter {self.cmd!r}: {exc}") from exc
        threading.Thread(target=self._pump, daemon=True).start()
        hello = self._read_line()
        try:
            announced = json.loads(hello).get("protocol")
        except (ValueError, AttributeError):
            announced = None
        if announced != PROTOCOL_VERSION:
            self.close()
            raise AdapterProtocolError(
                f"adapter announced {hello!r}, expected protocol {PROTOCOL_VERSION!r}"
            )

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)  # EOF sentinel

    def _read_line(self, deadline: float | None = None) -> str:
        remaining = self.timeout if deadline is None else deadline - time.monotonic()
        try:
            line = self._lines.get(timeout=max(0.0, remaining))
        except queue.Empty:
            raise AdapterTimeout(
                f"no adapter response within {self.timeout}s ({self.classifier_id})"
            ) from None
        if line is None:
            raise AdapterCrash(
                f"adapter exited with status {self._proc.wait()}; "
                f"stderr: {self._drain_stderr()!r}"
            )
        return line

    def _drain_stderr(self) -> str:
        try:
            return (self._proc.stderr.read() or "").strip()[-2000:]
        except (OSError, ValueError):
            return ""

    def submit(self, requests_batch) -> list[dict]:
        requests_batch = list(requests_batch)
        self.start()
        try:
            for req in requests_batch:
                self._proc.stdin.write(json.dumps(req) + "\n")
            self._proc.stdin.write("\n")  # flush marker
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise AdapterCrash(
                f"adapter pipe closed: {exc}; stderr: {self._drain_stderr()!r}"
            ) from exc
        responses = []
        deadline = time.monotonic() + self.timeout  # timeout covers the batch
        while len(responses) < len(requests_batch):
            line = self._read_line(deadline)
            if not line.strip():
                continue
            try:
                responses.append(json.loads(line))
            except ValueError:
                raise AdapterProtocolError(f"adapter sent non-JSON line {line!r}") from None
        return responses

    def close(self):
        if self._proc is None:
            return
        proc, self._proc = self._proc, None
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.wait(timeout=5)
        except (OSError, ValueError, subprocess.TimeoutExpired):
            proc.kill()
            proc.wait()


class HttpAdapter:
    """POSTs each batch to an adapter endpoint as NDJSON."""

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT, session=None):
        self.url = url
        self.timeout = timeout
        self.classifier_id = f"adapter-url:{url}"
        self._session = session or _requests.Session()

    def submit(self, requests_batch) -> list[dict]:
        body = "".join(json.dumps(req) + "\n" for req in requests_batch)
        try:
            resp = self._session.post(
                self.url,
                data=body.encode("utf-8"),
                headers={"Content-Type": "application/x-ndjson"},
                timeout=self.timeout,
            )
        except _requests.Timeout as exc:
            raise AdapterTimeout(f"adapter {self.url} timed out after {self.timeout}s") from exc
        except _requests.RequestException as exc:
            raise AdapterTimeout(f"adapter {self.url} unreachable: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise AdapterTimeout(f"adapter {self.url} returned {resp.status_code}")
        if not 200 <= resp.status_code < 300:
            raise AdapterProtocolError(f"adapter {self.url} returned {resp.status_code}")
        responses = []
        for line in resp.text.splitlines():
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError:
                raise AdapterProtocolError(f"adapter sent non-JSON line {line!r}") from None
            if isinstance(obj, dict) and "protocol" in obj and "id" not in obj:
                if obj["protocol"] != PROTOCOL_VERSION:
                    raise AdapterProtocolError(
                        f"adapter announced {obj['protocol']!r}, expected {PROTOCOL_VERSION!r}"
                    )
                continue
            responses.append(obj)
        return responses

    def close(self):
        self._session.close()
