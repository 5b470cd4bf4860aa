"""Text-generation and embedding providers.

Three interchangeable implementations:

* :class:`ScriptedProvider` — deterministic, test-grade. Entries match by
  substring or call ordinal; every call is logged so tests can inspect the
  exact prompts the engine produced.
* :class:`ReplayProvider` — replays a recorded tape (JSON lines) call by call.
* :class:`RemoteProvider` — HTTP chat-completion client with retry/backoff.

All providers are safe to call from multiple threads; call logs are ordered
by an atomic counter.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    ConfigError,
    ContractViolation,
    PayloadParseError,
    RetryableProviderError,
    ScriptMissError,
)

log = logging.getLogger(__name__)

ROLES = ("user", "assistant")


@dataclass
class GenerationRequest:
    """One chat-completion request: system prompt plus alternating messages."""

    system_prompt: str
    messages: list[tuple[str, str]]
    temperature: float = 0.9
    max_tokens: int = 200
    top_p: float = 1.0

    def __post_init__(self):
        if not self.messages:
            raise ContractViolation("messages must be non-empty")
        for role, _ in self.messages:
            if role not in ROLES:
                raise ContractViolation(f"unknown role {role!r}")
        for (a, _), (b, _) in zip(self.messages, self.messages[1:]):
            if a == b:
                raise ContractViolation("message roles must alternate")
        if not 0.0 <= self.temperature <= 2.0:
            raise ContractViolation(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens <= 0:
            raise ContractViolation("max_tokens must be positive")
        if not 0.0 < self.top_p <= 1.0:
            raise ContractViolation(f"top_p {self.top_p} outside (0, 1]")


@dataclass
class CallRecord:
    """A logged provider call: ordinal, full request, and what came back."""

    index: int
    request: GenerationRequest
    response_text: str
    payload: dict[str, float]

    @property
    def full_prompt(self) -> str:
        """System prompt and messages flattened for substring assertions."""
        parts = [self.request.system_prompt]
        parts.extend(text for _, text in self.request.messages)
        return "\n".join(parts)


class CallLog:
    """Thread-safe, totally ordered record of outbound generation calls."""

    def __init__(self):
        self._records: list[CallRecord] = []
        self._counter = itertools.count()
        self._lock = threading.Lock()

    def next_index(self) -> int:
        return next(self._counter)

    def append(self, record: CallRecord) -> None:
        with self._lock:
            self._records.append(record)

    def records(self) -> list[CallRecord]:
        with self._lock:
            return sorted(self._records, key=lambda r: r.index)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)


_JSON_FENCE = re.compile(r"```(?:json)?\s*(\{.*?\})\s*```", re.DOTALL)
_BARE_OBJECT = re.compile(r"\{[^{}]*\}", re.DOTALL)


def extract_json_payload(text: str, strict: bool = False) -> dict[str, float]:
    """Pull the first parseable JSON object out of completion text.

    Fenced blocks are preferred over bare objects. Only numeric values are
    kept (the engine's payloads are numeric score maps). In strict mode a
    missing or unparseable object raises :class:`PayloadParseError`.
    """
    candidates: list[str] = []
    fenced = _JSON_FENCE.search(text)
    if fenced:
        candidates.append(fenced.group(1))
    candidates.extend(_BARE_OBJECT.findall(text))
    for cand in candidates:
        try:
            obj = json.loads(cand)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return {k: float(v) for k, v in obj.items() if isinstance(v, (int, float))}
    if strict:
        raise PayloadParseError("no JSON object found in completion", raw_text=text)
    return {}


def hashed_embedding(text: str, dim: int = 64, seed: int = 0) -> np.ndarray:
    """Deterministic unit vector derived from a stable hash of the text.

    Equal texts map to equal vectors for any fixed (dim, seed); distinct
    texts collide with negligible probability.
    """
    digest = hashlib.sha256(f"{seed}:{text}".encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    vec = rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


@dataclass
class ScriptEntry:
    """One scripted response. ``matcher`` is a prompt substring or an int
    call ordinal (0-based)."""

    matcher: str | int
    response_text: str
    payload: dict[str, float] = field(default_factory=dict)


class ScriptedProvider:
    """Deterministic provider driven by a fixed script.

    Substring matchers are checked in entry order against the flattened
    prompt; ordinal matchers fire on the n-th call. At most one entry may
    match a call; in strict mode an unmatched call raises
    :class:`ScriptMissError`, otherwise ``default`` (or an echo) is used.
    """

    def __init__(
        self,
        entries: Iterable[ScriptEntry] = (),
        strict: bool = False,
        default: ScriptEntry | None = None,
        embed_dim: int = 64,
        seed: int = 0,
    ):
        self.entries = list(entries)
        self.strict = strict
        self.default = default
        self.embed_dim = embed_dim
        self.seed = seed
        self.call_log = CallLog()

    def _match(self, index: int, prompt: str) -> ScriptEntry | None:
        hits = []
        for entry in self.entries:
            if isinstance(entry.matcher, int):
                if entry.matcher == index:
                    hits.append(entry)
            elif entry.matcher in prompt:
                hits.append(entry)
        if len(hits) > 1:
            raise ConfigError(
                f"script ambiguous: {len(hits)} entries match call {index}"
            )
        return hits[0] if hits else None

    def generate(self, request: GenerationRequest) -> tuple[str, dict[str, float]]:
        index = self.call_log.next_index()
        prompt = request.system_prompt + "\n" + "\n".join(t for _, t in request.messages)
        entry = self._match(index, prompt)
        if entry is None:
            if self.strict:
                raise ScriptMissError(prompt)
            entry = self.default or ScriptEntry(
                matcher="", response_text="(scripted default response)", payload={}
            )
        record = CallRecord(index, request, entry.response_text, dict(entry.payload))
        self.call_log.append(record)
        return entry.response_text, dict(entry.payload)

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ContractViolation("cannot embed empty text")
        return hashed_embedding(text, self.embed_dim, self.seed)


class ReplayProvider:
    """Replays a recorded tape of calls, in order, exactly once each.

    Tapes are JSON-lines files (or pre-parsed dicts) with keys
    ``response_text`` and optional ``payload``. Calls past the end of the
    tape raise.
    """

    def __init__(self, tape: Iterable[dict] | str, embed_dim: int = 64, seed: int = 0):
        if isinstance(tape, str):
            with open(tape, "r", encoding="utf-8") as fh:
                self.tape = [json.loads(line) for line in fh if line.strip()]
        else:
            self.tape = list(tape)
        self.embed_dim = embed_dim
        self.seed = seed
        self.call_log = CallLog()

    def generate(self, request: GenerationRequest) -> tuple[str, dict[str, float]]:
        index = self.call_log.next_index()
        if index >= len(self.tape):
            raise RetryableProviderError(f"replay tape exhausted at call {index}")
        entry = self.tape[index]
        text = entry["response_text"]
        payload = {k: float(v) for k, v in entry.get("payload", {}).items()}
        self.call_log.append(CallRecord(index, request, text, payload))
        return text, payload

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ContractViolation("cannot embed empty text")
        return hashed_embedding(text, self.embed_dim, self.seed)


class RemoteProvider:
    """HTTP chat-completion client.

    Speaks the common ``/chat/completions`` JSON shape. The auth token is
    read from an environment variable so it never lands in config files.
    Transient failures are retried three times with exponential backoff,
    then surfaced as :class:`RetryableProviderError`.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        token_env: str = "GWPAIR_API_TOKEN",
        embed_model: str | None = None,
        embed_dim: int = 64,
        timeout: float = 60.0,
        max_attempts: int = 3,
        backoff: float = 1.0,
        strict_payload: bool = False,
        transport=None,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.model = model
        self.embed_model = embed_model
        self.embed_dim = embed_dim
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.strict_payload = strict_payload
        self.call_log = CallLog()
        headers = {}
        token = os.environ.get(token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(
            base_url=self.base_url, headers=headers, timeout=timeout, transport=transport
        )

    def _post_with_retry(self, path: str, body: dict) -> dict:
        import httpx

        last: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                resp = self._client.post(path, json=body)
                resp.raise_for_status()
                return resp.json()
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                last = exc
                if attempt + 1 < self.max_attempts:
                    time.sleep(self.backoff * (2**attempt))
        raise RetryableProviderError(f"remote call failed after {self.max_attempts} attempts: {last}")

    def generate(self, request: GenerationRequest) -> tuple[str, dict[str, float]]:
        index = self.call_log.next_index()
        body = {
            "model": self.model,
            "messages": [{"role": "system", "content": request.system_prompt}]
            + [{"role": role, "content": text} for role, text in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "top_p": request.top_p,
        }
        data = self._post_with_retry("/chat/completions", body)
        text = data["choices"][0]["message"]["content"]
        payload = extract_json_payload(text, strict=self.strict_payload)
        self.call_log.append(CallRecord(index, request, text, payload))
        return text, payload

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ContractViolation("cannot embed empty text")
        if self.embed_model is None:
            # No embedding endpoint configured; fall back to the hashed
            # deterministic embedding so retrieval still works offline.
            return hashed_embedding(text, self.embed_dim)
        data = self._post_with_retry("/embeddings", {"model": self.embed_model, "input": text})
        return np.asarray(data["data"][0]["embedding"], dtype=np.float64)


def record_tape(records: Iterable[CallRecord], path: str) -> None:
    """Write call records as a replay tape (request echoed for audit)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "index": rec.index,
                        "system_prompt": rec.request.system_prompt,
                        "messages": rec.request.messages,
                        "response_text": rec.response_text,
                        "payload": rec.payload,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
