"""Provider implementations: scripting, replay, payload extraction, embeddings."""

import json

import numpy as np
import pytest

from gwpair import GenerationRequest, ReplayProvider, ScriptEntry, ScriptedProvider
from gwpair.errors import ContractViolation, RetryableProviderError, ScriptMissError
from gwpair.providers import extract_json_payload, hashed_embedding


def req(text, system="sys"):
    return GenerationRequest(system_prompt=system, messages=[("user", text)])


def test_request_validation():
    with pytest.raises(ContractViolation):
        GenerationRequest(system_prompt="s", messages=[])
    with pytest.raises(ContractViolation):
        GenerationRequest(system_prompt="s", messages=[("user", "a"), ("user", "b")])
    with pytest.raises(ContractViolation):
        GenerationRequest(system_prompt="s", messages=[("user", "a")], temperature=3.0)


def test_scripted_substring_match_and_call_log():
    provider = ScriptedProvider(
        [ScriptEntry("interview", "scripted reply", {"valence": -0.2})]
    )
    text, payload = provider.generate(req("my interview is tomorrow"))
    assert text == "scripted reply"
    assert payload == {"valence": -0.2}
    records = provider.call_log.records()
    assert len(records) == 1
    assert "interview" in records[0].full_prompt


def test_scripted_ordinal_match():
    provider = ScriptedProvider(
        [ScriptEntry(0, "first", {}), ScriptEntry(1, "second", {})]
    )
    assert provider.generate(req("x"))[0] == "first"
    assert provider.generate(req("x"))[0] == "second"


def test_scripted_strict_mode_names_unmatched_prompt():
    provider = ScriptedProvider([ScriptEntry("never", "n/a", {})], strict=True)
    with pytest.raises(ScriptMissError) as err:
        provider.generate(req("something else"))
    assert "something else" in str(err.value)


def test_scripted_non_strict_uses_default():
    provider = ScriptedProvider([], default=ScriptEntry("", "fallback", {"x": 1.0}))
    text, payload = provider.generate(req("anything"))
    assert text == "fallback"
    assert payload == {"x": 1.0}


def test_replay_provider_tape_semantics(tmp_path):
    tape = [
        {"response_text": "one", "payload": {"a": 1}},
        {"response_text": "two", "payload": {}},
    ]
    path = tmp_path / "tape.jsonl"
    path.write_text("\n".join(json.dumps(t) for t in tape))
    provider = ReplayProvider(str(path))
    assert provider.generate(req("q1"))[0] == "one"
    assert provider.generate(req("q2"))[0] == "two"
    with pytest.raises(RetryableProviderError):
        provider.generate(req("q3"))


def test_payload_extraction_from_prose():
    text = 'The analysis gives {"valence": -0.48, "arousal": 0.68} overall.'
    assert extract_json_payload(text) == {"valence": -0.48, "arousal": 0.68}


def test_payload_extraction_prefers_fenced_block():
    text = 'noise {"a": 1} noise\n```json\n{"valence": 0.5}\n```'
    assert extract_json_payload(text) == {"valence": 0.5}


def test_payload_extraction_strict_raises():
    from gwpair.errors import PayloadParseError

    with pytest.raises(PayloadParseError) as err:
        extract_json_payload("no json here", strict=True)
    assert "no json here" in err.value.raw_text


def test_embedding_determinism_and_self_similarity():
    provider = ScriptedProvider(seed=5)
    a = provider.embed("same text")
    b = provider.embed("same text")
    assert np.allclose(a, b)
    cos = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
    assert cos == pytest.approx(1.0, abs=1e-9)


def test_embedding_no_collisions_over_100_texts():
    provider = ScriptedProvider(seed=9)
    vectors = [tuple(provider.embed(f"text number {i}")) for i in range(100)]
    assert len(set(vectors)) == 100


def test_embedding_seed_changes_vectors():
    assert not np.allclose(hashed_embedding("t", seed=1), hashed_embedding("t", seed=2))


def test_call_log_total_order_under_threads():
    import threading

    provider = ScriptedProvider([ScriptEntry("q", "r", {})])
    threads = [
        threading.Thread(target=lambda: provider.generate(req("q"))) for _ in range(16)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    indices = [r.index for r in provider.call_log.records()]
    assert indices == sorted(indices)
    assert len(set(indices)) == 16


class TestRemoteProvider:
    def make(self, handler, **kwargs):
        import httpx

        from gwpair.providers import RemoteProvider

        return RemoteProvider(
            base_url="http://fake.local/v1",
            model="test-model",
            transport=httpx.MockTransport(handler),
            backoff=0.001,
            **kwargs,
        )

    def test_completion_and_payload_extraction(self):
        import httpx

        def handler(request):
            body = json.loads(request.content)
            assert body["model"] == "test-model"
            assert body["messages"][0]["role"] == "system"
            return httpx.Response(
                200,
                json={
                    "choices": [
                        {"message": {"content": 'I sense {"valence": -0.48} here.'}}
                    ]
                },
            )

        provider = self.make(handler)
        text, payload = provider.generate(req("how are you"))
        assert payload == {"valence": -0.48}
        assert "valence" in text

    def test_transient_errors_retried_then_succeed(self):
        import httpx

        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] < 3:
                return httpx.Response(500)
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "ok {}"}}]}
            )

        provider = self.make(handler)
        text, _ = provider.generate(req("q"))
        assert text == "ok {}"
        assert calls["n"] == 3

    def test_persistent_failure_surfaces_after_three_attempts(self):
        import httpx

        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            return httpx.Response(503)

        provider = self.make(handler)
        with pytest.raises(RetryableProviderError):
            provider.generate(req("q"))
        assert calls["n"] == 3

    def test_remote_embedding_endpoint(self):
        import httpx

        def handler(request):
            if request.url.path.endswith("/embeddings"):
                return httpx.Response(
                    200, json={"data": [{"embedding": [0.1, 0.2, 0.3]}]}
                )
            return httpx.Response(200, json={"choices": [{"message": {"content": "x"}}]})

        provider = self.make(handler, embed_model="embedder")
        vec = provider.embed("text")
        assert list(vec) == pytest.approx([0.1, 0.2, 0.3])


def test_scripted_ambiguous_entries_rejected():
    from gwpair.errors import ConfigError

    provider = ScriptedProvider(
        [ScriptEntry("interview", "a", {}), ScriptEntry("view", "b", {})]
    )
    with pytest.raises(ConfigError):
        provider.generate(req("the interview"))
