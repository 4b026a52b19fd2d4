"""Wire-format tests for the HTTP backends and transport-error propagation."""

from __future__ import annotations

import numpy as np
import pytest

from kgqa.embedding import HttpEmbedder
from kgqa.errors import ConfigError, TransportError
from kgqa.pipeline import PipelineConfig, answer_question
from kgqa.providers import CompletionProvider, CompletionTransportError, HttpChatProvider

from conftest import Q2_QUESTION


class _FakeResponse:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status
        self.text = str(payload)

    def json(self):
        return self._payload


class TestHttpEmbedder:
    def test_request_and_normalization(self, monkeypatch):
        seen = {}

        def fake_post(url, json=None, timeout=None):
            seen["url"] = url
            seen["json"] = json
            return _FakeResponse({"vectors": [[3.0, 4.0] + [0.0] * 6] * len(json["texts"])})

        monkeypatch.setattr("kgqa.embedding.requests.post", fake_post)
        embedder = HttpEmbedder("http://embed.test/embed", dimension=8)
        vec = embedder.embed("boeing")
        assert seen["url"] == "http://embed.test/embed"
        assert seen["json"] == {"texts": ["boeing"]}
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-9

    def test_shape_mismatch_is_transport_error(self, monkeypatch):
        monkeypatch.setattr(
            "kgqa.embedding.requests.post",
            lambda *a, **k: _FakeResponse({"vectors": [[1.0, 0.0]]}),
        )
        embedder = HttpEmbedder("http://embed.test/embed", dimension=8)
        with pytest.raises(TransportError):
            embedder.embed("x")


class TestHttpChatProvider:
    def test_payload_shape(self, monkeypatch):
        seen = {}

        def fake_post(url, json=None, headers=None, timeout=None):
            seen["url"] = url
            seen["json"] = json
            seen["headers"] = headers
            return _FakeResponse(
                {"choices": [{"message": {"content": f"c{i}"}} for i in range(json["n"])]}
            )

        monkeypatch.setattr("kgqa.providers.requests.post", fake_post)
        monkeypatch.setenv("KGQA_API_KEY", "secret")
        provider = HttpChatProvider("http://llm.test/v1", model="m")
        out = provider.complete("hello", temperature=0.9, n=2)
        assert out == ["c0", "c1"]
        assert seen["url"] == "http://llm.test/v1/chat/completions"
        assert seen["json"]["model"] == "m"
        assert seen["json"]["temperature"] == 0.9
        assert seen["json"]["messages"] == [{"role": "user", "content": "hello"}]
        assert seen["headers"]["Authorization"] == "Bearer secret"

    def test_missing_api_key_is_config_error(self, monkeypatch):
        monkeypatch.delenv("KGQA_API_KEY", raising=False)
        with pytest.raises(ConfigError):
            HttpChatProvider("http://llm.test/v1", model="m").complete("p", 0.9, 1)

    def test_http_error_is_transport_error(self, monkeypatch):
        monkeypatch.setattr(
            "kgqa.providers.requests.post", lambda *a, **k: _FakeResponse({}, status=500)
        )
        monkeypatch.setenv("KGQA_API_KEY", "secret")
        with pytest.raises(CompletionTransportError):
            HttpChatProvider("http://llm.test/v1", model="m").complete("p", 0.9, 1)


class _ExplodingProvider(CompletionProvider):
    def complete(self, prompt, temperature, n):
        raise CompletionTransportError("boom")


def test_transport_error_propagates_through_pipeline(rockets, rockets_index, rockets_trainset):
    # A transport failure must never degrade into an empty Prediction.
    with pytest.raises(CompletionTransportError):
        answer_question(
            Q2_QUESTION,
            rockets,
            rockets_index,
            rockets_trainset,
            _ExplodingProvider(),
            PipelineConfig(k=3),
        )
