"""Execute prompts against a chat-completion HTTP endpoint with an
append-only JSONL response cache, bounded retries, and corpus-ordered
hypothesis export.

The wire format is a chat-completions-style JSON body (``model``,
``messages``, ``temperature``); the reply must carry the completion text
at ``choices[0].message.content``. Cache entries are keyed by a digest of
the serialized messages plus model name and temperature, so re-running an
unchanged configuration never touches the network.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import requests

from .corpus import Entry
from .errors import NeoGateError
from .promptkit import ChatMessage, Exemplar, PromptSpec, build_prompt, extract_translation

logger = logging.getLogger(__name__)

API_KEY_ENV = "NEOGATE_API_KEY"


class NetworkError(NeoGateError):
    """The endpoint stayed unreachable after all retries."""


class AuthError(NeoGateError):
    """The endpoint rejected the credential; the run is aborted."""


class CacheCorruption(NeoGateError):
    """The cache file contains an unreadable record."""


class MissingEntry(NeoGateError):
    """The run records do not cover the corpus."""


@dataclass(frozen=True)
class ClientConfig:
    endpoint: str
    model: str
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 2
    rate_limit: float = 0.0  # requests per second; 0 disables throttling
    concurrency: int = 1


@dataclass(frozen=True)
class RunRecord:
    entry_id: str
    prompt_hash: str
    raw: str
    outcome: str  # "ok" | "unparseable" | "failed"
    translation: str | None
    model: str
    requested_at: str
    completed_at: str

    def to_json(self) -> str:
        return json.dumps(self.__dict__, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__})


def prompt_hash(messages: Sequence[ChatMessage], model: str, temperature: float) -> str:
    """Stable digest of a prompt: message list plus model and temperature."""
    payload = json.dumps(
        {
            "model": model,
            "temperature": temperature,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
        },
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class JsonlCache:
    """Append-only JSONL store of run records indexed by prompt hash."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index: dict[str, RunRecord] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        offset = 0
        with open(self.path, "rb") as fh:
            for raw_line in fh:
                line = raw_line.decode("utf-8", errors="replace").strip()
                if line:
                    try:
                        record = RunRecord.from_json(json.loads(line))
                    except (json.JSONDecodeError, KeyError, TypeError) as exc:
                        raise CacheCorruption(
                            f"{self.path}: bad record at byte offset {offset}: {exc}"
                        ) from exc
                    self._index[record.prompt_hash] = record
                offset += len(raw_line)

    def get(self, key: str) -> RunRecord | None:
        with self._lock:
            return self._index.get(key)

    def records(self) -> list[RunRecord]:
        with self._lock:
            return list(self._index.values())

    def put(self, record: RunRecord) -> None:
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")
            self._index[record.prompt_hash] = record

    def __len__(self) -> int:
        return len(self._index)


class _Throttle:
    def __init__(self, rate: float):
        self.interval = 1.0 / rate if rate > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self.interval
        if delay > 0:
            time.sleep(delay)


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class ChatClient:
    """Minimal chat-completions client with bounded retries."""

    config: ClientConfig
    session: requests.Session = field(default_factory=requests.Session)

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": self.config.temperature,
        }
        headers = {}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                time.sleep(min(2.0, 0.1 * 2 ** attempt))
            try:
                response = self.session.post(
                    self.config.endpoint,
                    json=body,
                    headers=headers,
                    timeout=self.config.timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                logger.warning("request failed (attempt %d): %s", attempt + 1, exc)
                continue
            if response.status_code in (401, 403):
                raise AuthError(f"endpoint rejected credentials ({response.status_code})")
            if response.status_code != 200:
                last_error = NetworkError(f"HTTP {response.status_code}")
                logger.warning(
                    "HTTP %d (attempt %d)", response.status_code, attempt + 1
                )
                continue
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (ValueError, LookupError, TypeError) as exc:
                last_error = exc
                logger.warning("malformed response body (attempt %d): %s", attempt + 1, exc)
                continue
        raise NetworkError(f"retries exhausted: {last_error}")


def run_corpus(
    corpus: Sequence[Entry],
    spec: PromptSpec,
    config: ClientConfig,
    cache_path: str | Path,
    exemplars: tuple[Exemplar, ...] | list[Exemplar] = (),
    client: ChatClient | None = None,
) -> list[RunRecord]:
    """Obtain one completion per entry, consulting the cache first.

    Responses are appended to the cache as they arrive, so an interrupted
    run resumes where it stopped. Entries whose request keeps failing are
    marked ``failed`` and the run continues; an authentication failure
    aborts the whole run.
    """
    cache = JsonlCache(cache_path)
    client = client or ChatClient(config)
    throttle = _Throttle(config.rate_limit)

    prompts = [build_prompt(e.source, spec, exemplars) for e in corpus]
    hashes = [prompt_hash(p, config.model, config.temperature) for p in prompts]

    def fetch(i: int) -> RunRecord:
        entry = corpus[i]
        cached = cache.get(hashes[i])
        if cached is not None:
            return replace(cached, entry_id=entry.entry_id)
        requested_at = _utcnow()
        throttle.wait()
        try:
            raw = client.complete(prompts[i])
        except NetworkError as exc:
            logger.error("entry %s failed: %s", entry.entry_id, exc)
            # not cached: a failed entry is retried by the next run
            return RunRecord(
                entry_id=entry.entry_id,
                prompt_hash=hashes[i],
                raw="",
                outcome="failed",
                translation=None,
                model=config.model,
                requested_at=requested_at,
                completed_at=_utcnow(),
            )
        extraction = extract_translation(raw, spec)
        record = RunRecord(
            entry_id=entry.entry_id,
            prompt_hash=hashes[i],
            raw=raw,
            outcome=extraction.outcome,
            translation=extraction.translation,
            model=config.model,
            requested_at=requested_at,
            completed_at=_utcnow(),
        )
        cache.put(record)
        return record

    if config.concurrency <= 1:
        return [fetch(i) for i in range(len(corpus))]
    with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
        return list(pool.map(fetch, range(len(corpus))))


def export_hypotheses(records: Sequence[RunRecord], corpus_order: Sequence[str]) -> str:
    """Render records as a hypothesis file: one line per entry, in corpus
    order, blank for failed or unparseable entries."""
    by_id = {r.entry_id: r for r in records}
    lines = []
    for entry_id in corpus_order:
        record = by_id.get(entry_id)
        if record is None:
            raise MissingEntry(f"no run record for entry {entry_id}")
        text = record.translation if record.outcome == "ok" else None
        lines.append((text or "").replace("\n", " "))
    return "\n".join(lines) + "\n"
