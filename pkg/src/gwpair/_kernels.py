"""Numeric kernel for memory retrieval scoring.

The one hot loop in the engine: blending cosine similarity against every
stored embedding with each item's salience tag. Compiled with numba unless
``GWPAIR_NO_NUMBA=1`` (or numba is unavailable), in which case a vectorized
numpy fallback is used. Both paths produce identical scores; see
benchmarks/bench_retrieval.py for the comparison.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("GWPAIR_NO_NUMBA", "") == "1"


def _blended_scores_numpy(
    embeddings: np.ndarray, query: np.ndarray, tags: np.ndarray, lam: float
) -> np.ndarray:
    norms = np.linalg.norm(embeddings, axis=1) * np.linalg.norm(query)
    norms = np.where(norms == 0.0, 1.0, norms)
    cos = (embeddings @ query) / norms
    return (1.0 - lam) * cos + lam * tags


if not _DISABLE:
    try:
        from numba import njit

        @njit(cache=True)
        def _blended_scores_njit(embeddings, query, tags, lam):  # pragma: no cover - jit
            n, d = embeddings.shape
            out = np.empty(n)
            qnorm = 0.0
            for k in range(d):
                qnorm += query[k] * query[k]
            qnorm = np.sqrt(qnorm)
            for i in range(n):
                dot = 0.0
                enorm = 0.0
                for k in range(d):
                    dot += embeddings[i, k] * query[k]
                    enorm += embeddings[i, k] * embeddings[i, k]
                denom = np.sqrt(enorm) * qnorm
                if denom == 0.0:
                    denom = 1.0
                out[i] = (1.0 - lam) * (dot / denom) + lam * tags[i]
            return out

        _IMPL = "numba"
    except ImportError:  # pragma: no cover - env without numba
        _IMPL = "numpy"
else:
    _IMPL = "numpy"


def active_impl() -> str:
    return _IMPL


def blended_scores(
    embeddings: np.ndarray, query: np.ndarray, tags: np.ndarray, lam: float
) -> np.ndarray:
    """Score = (1-lam)*cosine(query, item) + lam*salience_tag, per item."""
    embeddings = np.ascontiguousarray(embeddings, dtype=np.float64)
    query = np.ascontiguousarray(query, dtype=np.float64)
    tags = np.ascontiguousarray(tags, dtype=np.float64)
    if embeddings.size == 0:
        return np.empty(0)
    if _IMPL == "numba":
        return _blended_scores_njit(embeddings, query, tags, lam)
    return _blended_scores_numpy(embeddings, query, tags, lam)
