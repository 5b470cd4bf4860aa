"""Memory store: retrieval scoring, breadth scaling, consolidation,
persistence, kernel parity."""

import random
import subprocess
import sys

import numpy as np
import pytest

from gwpair import MemoryStore, ScriptedProvider, effective_k
from gwpair._kernels import blended_scores
from gwpair.errors import ContractViolation, RetryableProviderError
from gwpair.memory import SALIENCE_BLEND


@pytest.fixture
def store():
    return MemoryStore(provider=ScriptedProvider(seed=21))


def brute_force_ranking(store, query, lam=SALIENCE_BLEND):
    query_emb = store.provider.embed(query)
    scored = []
    for item in store.items:
        if item.embedding is None:
            continue
        cos = float(
            item.embedding @ query_emb
            / (np.linalg.norm(item.embedding) * np.linalg.norm(query_emb))
        )
        scored.append((-(cos * (1 - lam) + item.salience_tag * lam), item.id))
    return [item_id for _, item_id in sorted(scored)]


def test_empty_store_returns_empty(store):
    assert store.retrieve("anything", k=3, openness=0.5) == []


def test_exact_text_is_top_ranked(store):
    store.store("the mountain trail at dawn")
    store.store("a quiet afternoon by the sea")
    store.store("city lights and loud music")
    top = store.retrieve("the mountain trail at dawn", k=1, openness=0.5)
    assert top[0].content == "the mountain trail at dawn"


def test_ids_unique_and_episodic_turn_index_monotone(store):
    first = store.store("one")
    second = store.store("two")
    assert first.id != second.id
    assert (first.turn_index, second.turn_index) == (0, 1)


def test_salience_tag_breaks_similarity_ties(store):
    low = store.store("identical content", salience_tag=0.1)
    high = store.store("identical content", salience_tag=0.9)
    ranked = store.retrieve("identical content", k=2, openness=0.5)
    assert ranked[0].id == high.id
    assert ranked[1].id == low.id


def test_effective_k_formula():
    assert effective_k(4, 0.5) == 4
    assert effective_k(4, 1.0) == 6
    assert effective_k(1, 0.0) == 1  # floor at round-half-up of 0.5


def test_effective_k_non_decreasing_in_openness():
    for k in (1, 3, 5, 8):
        values = [effective_k(k, o / 20.0) for o in range(21)]
        assert values == sorted(values)


def test_ranking_matches_brute_force_oracle_on_200_items(store):
    rng = random.Random(77)
    for i in range(200):
        store.store(
            f"memory fragment {i} about {rng.choice(['sea', 'work', 'music', 'food'])}",
            salience_tag=rng.random(),
        )
    for query in ("a day near the sea", "stress at work", "loud music", "memory fragment 42"):
        got = [it.id for it in store.retrieve(query, k=200, openness=1.0)]
        expected = brute_force_ranking(store, query)[: len(got)]
        assert got == expected


def test_consolidate_salience_tag_arithmetic(store):
    store.consolidate("q", "r", emotion_payload={"valence": 0.0, "arousal": 0.0})
    assert store.items[-1].salience_tag == pytest.approx(0.0)
    store.consolidate("q", "r", emotion_payload={"valence": -0.48, "arousal": 0.68})
    assert store.items[-1].salience_tag == pytest.approx(0.58)


def test_consolidate_counts_episodic(store):
    before = store.episodic_count()
    for i in range(5):
        store.consolidate(f"q{i}", f"r{i}", emotion_payload={})
    assert store.episodic_count() == before + 5


def test_deferred_embedding_excluded_until_backfilled():
    class FlakyEmbed(ScriptedProvider):
        def __init__(self):
            super().__init__(seed=1)
            self.fail = True

        def embed(self, text):
            if self.fail:
                raise RetryableProviderError("embedding down")
            return super().embed(text)

    provider = FlakyEmbed()
    store = MemoryStore(provider=provider)
    item = store.store("unreachable for now")
    assert item.embedding is None
    provider.fail = False
    store.store("reachable")
    assert all(it.content != "unreachable for now" for it in store.retrieve("unreachable for now", 5, 1.0))
    assert store.backfill_embeddings() == 1
    ranked = store.retrieve("unreachable for now", 5, 1.0)
    assert ranked[0].content == "unreachable for now"


def test_dimension_mismatch_rejected(store):
    store.store("first")

    class WrongDim:
        def embed(self, text):
            return np.ones(3)

    store.provider = WrongDim()
    with pytest.raises(ContractViolation):
        store.store("second")


def test_jsonl_roundtrip(tmp_path, store):
    store.store("alpha", salience_tag=0.4)
    store.consolidate("q", "r", emotion_payload={"valence": 0.5, "arousal": 0.5})
    path = tmp_path / "memory.jsonl"
    store.save_jsonl(str(path))
    other = MemoryStore(provider=store.provider)
    other.load_jsonl(str(path))
    assert [it.content for it in other.items] == [it.content for it in store.items]
    assert [it.salience_tag for it in other.items] == [it.salience_tag for it in store.items]
    got = [it.id for it in other.retrieve("alpha", 2, 0.5)]
    expected = [it.id for it in store.retrieve("alpha", 2, 0.5)]
    assert got == expected


def test_working_ring_bounded(store):
    for i in range(15):
        store.consolidate(f"q{i}", f"r{i}", emotion_payload={})
    assert len(store.working) == 10
    assert store.working[0][0] == "q5"


def test_kernel_matches_numpy_fallback():
    rng = np.random.default_rng(3)
    embeddings = rng.standard_normal((50, 16))
    query = rng.standard_normal(16)
    tags = rng.random(50)
    from gwpair._kernels import _blended_scores_numpy

    fast = blended_scores(embeddings, query, tags, 0.3)
    slow = _blended_scores_numpy(embeddings, query, tags, 0.3)
    assert np.allclose(fast, slow, atol=1e-12)


def test_numpy_fallback_env_flag_selects_numpy():
    code = (
        "import os; os.environ['GWPAIR_NO_NUMBA']='1'; "
        "from gwpair import _kernels; print(_kernels.active_impl())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "numpy"
