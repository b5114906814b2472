"""Chat-completions client with retries and an append-only JSONL response cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Sequence

import httpx

log = logging.getLogger(__name__)

Messages = list[dict[str, str]]


class LlmError(RuntimeError):
    pass


class NetworkError(LlmError):
    pass


class AuthError(LlmError):
    pass


@dataclass(frozen=True)
class LlmConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    temperature: float = 1.0
    seed: int | None = None
    api_key_env: str = "OPENAI_API_KEY"
    max_attempts: int = 5
    backoff_base: float = 1.0
    timeout: float = 120.0
    max_in_flight: int = 4
    offline: bool = False  # answer from the cache only

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LlmConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def request_fields(self) -> dict[str, Any]:
        """The parts of the config that change the response."""
        return {"base_url": self.base_url, "model": self.model, "temperature": self.temperature, "seed": self.seed}


@dataclass
class LlmExchange:
    key: str
    messages: Messages
    text: str
    timestamp: str
    attempts: int
    config: dict[str, Any] = field(default_factory=dict)
    replicate: str = "0"
    cached: bool = False


def cache_key(messages: Messages, config: LlmConfig, replicate: str | int = 0) -> str:
    """Hash of the request. ``replicate`` separates repeated draws of the same prompt."""
    payload = {"messages": messages, "config": config.request_fields(), "replicate": str(replicate)}
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ResponseCache:
    """One JSON object per line; the first entry for a key wins."""

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path else None
        self._entries: dict[str, dict[str, Any]] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        entry = json.loads(line)
                    except json.JSONDecodeError:
                        log.warning("%s:%d: skipping corrupt cache line", self.path, lineno)
                        continue
                    self._entries.setdefault(entry["key"], entry)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> dict[str, Any] | None:
        return self._entries.get(key)

    def append(self, exchange: LlmExchange) -> None:
        entry = asdict(exchange)
        entry.pop("cached")
        with self._lock:
            if exchange.key in self._entries:
                return
            self._entries[exchange.key] = entry
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")


RETRY_STATUS = {408, 409, 429, 500, 502, 503, 504}


class LlmClient:
    def __init__(
        self,
        config: LlmConfig,
        cache: ResponseCache | None = None,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.cache = cache if cache is not None else ResponseCache(None)
        self._transport = transport
        self._sleep = sleep
        self._http: httpx.Client | None = None
        self._http_lock = threading.Lock()
        self.network_calls = 0

    def api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "").strip()
        if not key:
            raise AuthError(f"environment variable {self.config.api_key_env} is not set")
        return key

    def _client(self) -> httpx.Client:
        with self._http_lock:
            if self._http is None:
                self._http = httpx.Client(
                    base_url=self.config.base_url.rstrip("/"),
                    timeout=self.config.timeout,
                    transport=self._transport,
                    headers={"Authorization": f"Bearer {self.api_key()}"},
                )
        return self._http

    def close(self) -> None:
        if self._http is not None:
            self._http.close()
            self._http = None

    def _post(self, messages: Messages) -> tuple[str, int]:
        body: dict[str, Any] = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        }
        if self.config.seed is not None:
            body["seed"] = self.config.seed
        last: Exception | None = None
        for attempt in range(1, self.config.max_attempts + 1):
            try:
                self.network_calls += 1
                resp = self._client().post("/chat/completions", json=body)
            except httpx.TransportError as exc:
                last = exc
            else:
                if resp.status_code in (401, 403):
                    raise AuthError(f"endpoint refused credentials ({resp.status_code})")
                if resp.status_code == 200:
                    text = _extract_text(resp)
                    if text:
                        return text, attempt
                    last = LlmError("empty completion")
                elif resp.status_code in RETRY_STATUS or resp.status_code >= 500:
                    last = LlmError(f"HTTP {resp.status_code}")
                else:
                    raise LlmError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            if attempt < self.config.max_attempts:
                delay = self.config.backoff_base * 2 ** (attempt - 1)
                log.info("request failed (%s); retrying in %.1fs", last, delay)
                self._sleep(delay)
        raise NetworkError(f"giving up after {self.config.max_attempts} attempts: {last}")

    def complete(self, messages: Messages, replicate: str | int = 0) -> LlmExchange:
        key = cache_key(messages, self.config, replicate)
        hit = self.cache.get(key)
        if hit is not None:
            return LlmExchange(
                key, hit["messages"], hit["text"], hit["timestamp"], hit["attempts"],
                hit.get("config", {}), str(hit.get("replicate", replicate)), cached=True,
            )
        if self.config.offline:
            raise NetworkError(f"cache miss for request {key[:12]} in offline mode")
        text, attempts = self._post(messages)
        exchange = LlmExchange(
            key,
            messages,
            text,
            datetime.now(timezone.utc).isoformat(timespec="seconds"),
            attempts,
            self.config.request_fields(),
            str(replicate),
        )
        self.cache.append(exchange)
        return exchange

    def complete_many(self, requests: Sequence[tuple[Messages, str | int]]) -> list[LlmExchange]:
        """Run requests with bounded concurrency; results keep input order."""
        if self.config.max_in_flight <= 1 or len(requests) <= 1:
            return [self.complete(m, r) for m, r in requests]
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            return list(pool.map(lambda req: self.complete(*req), requests))


def _extract_text(resp: httpx.Response) -> str:
    try:
        data = resp.json()
        return (data["choices"][0]["message"]["content"] or "").strip()
    except (ValueError, KeyError, IndexError, TypeError):
        return ""
