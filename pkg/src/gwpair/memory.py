"""Dual episodic/semantic memory with embedding-similarity retrieval.

Items are scored by ``(1 - lam) * cosine + lam * salience_tag``; openness
widens retrieval breadth via ``k_eff = round(k * (0.5 + openness))``.
A bounded working-memory ring keeps the last ten turns for verbatim prompt
injection. Stores are single-writer per agent; reads may be concurrent.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._kernels import blended_scores
from .errors import ContractViolation, ProviderError

EPISODIC = "episodic"
SEMANTIC = "semantic"
WORKING = "working"

SALIENCE_BLEND = 0.3  # lam: weight of salience_tag against cosine similarity
WORKING_RING_SIZE = 10


@dataclass
class MemoryItem:
    id: int
    kind: str
    content: str
    embedding: np.ndarray | None
    turn_index: int
    confidence: float = 1.0
    salience_tag: float = 0.0

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "content": self.content,
            "embedding": None if self.embedding is None else [float(x) for x in self.embedding],
            "turn_index": self.turn_index,
            "confidence": self.confidence,
            "salience_tag": self.salience_tag,
        }

    @staticmethod
    def from_json(obj: dict) -> "MemoryItem":
        emb = obj.get("embedding")
        return MemoryItem(
            id=obj["id"],
            kind=obj["kind"],
            content=obj["content"],
            embedding=None if emb is None else np.asarray(emb, dtype=np.float64),
            turn_index=obj["turn_index"],
            confidence=obj.get("confidence", 1.0),
            salience_tag=obj.get("salience_tag", 0.0),
        )


def effective_k(k: int, openness: float) -> int:
    """Breadth-scaled result count, rounded half up."""
    if k < 1:
        raise ContractViolation("k must be >= 1")
    return int(math.floor(k * (0.5 + openness) + 0.5))


@dataclass
class MemoryStore:
    """Per-agent memory: episodic + semantic items plus the working ring."""

    provider: object
    items: list[MemoryItem] = field(default_factory=list)
    working: deque = field(default_factory=lambda: deque(maxlen=WORKING_RING_SIZE))
    _next_id: int = 0
    _episodic_count: int = 0
    _dim: int | None = None

    def store(
        self,
        content: str,
        kind: str = EPISODIC,
        confidence: float = 1.0,
        salience_tag: float = 0.0,
    ) -> MemoryItem:
        """Persist one item with its provider embedding.

        If embedding fails the item is kept with a deferred-embedding flag
        (``embedding is None``) and skipped by retrieval until backfilled.
        """
        if not content:
            raise ContractViolation("cannot store empty content")
        try:
            embedding = np.asarray(self.provider.embed(content), dtype=np.float64)
        except ProviderError:
            embedding = None
        if embedding is not None:
            if self._dim is None:
                self._dim = embedding.shape[0]
            elif embedding.shape[0] != self._dim:
                raise ContractViolation(
                    f"embedding dimension {embedding.shape[0]} != store dimension {self._dim}"
                )
        turn_index = self._episodic_count if kind == EPISODIC else 0
        item = MemoryItem(
            id=self._next_id,
            kind=kind,
            content=content,
            embedding=embedding,
            turn_index=turn_index,
            confidence=confidence,
            salience_tag=min(1.0, max(0.0, salience_tag)),
        )
        self._next_id += 1
        if kind == EPISODIC:
            self._episodic_count += 1
        self.items.append(item)
        return item

    def backfill_embeddings(self) -> int:
        """Embed items stored while the provider was down. Returns count."""
        fixed = 0
        for item in self.items:
            if item.embedding is None:
                item.embedding = np.asarray(self.provider.embed(item.content), dtype=np.float64)
                if self._dim is None:
                    self._dim = item.embedding.shape[0]
                fixed += 1
        return fixed

    def retrieve(self, query: str, k: int, openness: float) -> list[MemoryItem]:
        """Top items by blended score; breadth scales with openness."""
        k_eff = effective_k(k, openness)
        ready = [it for it in self.items if it.embedding is not None]
        if not ready:
            return []
        query_emb = np.asarray(self.provider.embed(query), dtype=np.float64)
        embs = np.stack([it.embedding for it in ready])
        tags = np.array([it.salience_tag for it in ready])
        scores = blended_scores(embs, query_emb, tags, SALIENCE_BLEND)
        # Stable order: score descending, insertion order as tie-break.
        order = sorted(range(len(ready)), key=lambda i: (-scores[i], ready[i].id))
        return [ready[i] for i in order[: min(k_eff, len(ready))]]

    def consolidate(
        self,
        query: str,
        response: str,
        history: list[tuple[str, str]] | None = None,
        emotion_payload: dict[str, float] | None = None,
    ) -> list[MemoryItem]:
        """Write the turn to episodic memory, tagged by emotional salience.

        salience_tag = |valence| * 0.5 + arousal * 0.5.
        """
        payload = emotion_payload or {}
        valence = float(payload.get("valence", 0.0))
        arousal = float(payload.get("arousal", 0.0))
        tag = abs(valence) * 0.5 + arousal * 0.5
        item = self.store(
            content=f"Q: {query}\nA: {response}",
            kind=EPISODIC,
            salience_tag=tag,
        )
        self.working.append((query, response))
        return [item]

    def working_context(self) -> str:
        return "\n".join(f"Q: {q}\nA: {a}" for q, a in self.working)

    def episodic_count(self) -> int:
        return sum(1 for it in self.items if it.kind == EPISODIC)

    def save_jsonl(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for item in self.items:
                fh.write(json.dumps(item.to_json(), sort_keys=True) + "\n")

    def load_jsonl(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            self.items = [MemoryItem.from_json(json.loads(line)) for line in fh if line.strip()]
        if self.items:
            self._next_id = max(it.id for it in self.items) + 1
            self._episodic_count = sum(1 for it in self.items if it.kind == EPISODIC)
            dims = {it.embedding.shape[0] for it in self.items if it.embedding is not None}
            self._dim = dims.pop() if len(dims) == 1 else self._dim
