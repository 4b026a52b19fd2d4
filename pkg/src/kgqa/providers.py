"""Completion provider backends.

Three implementations of one interface: an OpenAI-compatible HTTP client, a
deterministic replay backend keyed by SHA-256 of the prompt, and a recording
wrapper that captures live responses into the replay format.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Dict, List

import requests

from .errors import ConfigError, TransportError


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class CompletionProvider:
    """Interface: complete(prompt, temperature, n) -> exactly n strings."""

    def complete(self, prompt: str, temperature: float, n: int) -> List[str]:
        raise NotImplementedError


class CompletionTransportError(TransportError):
    pass


class ReplayMissError(ConfigError):
    """The replay file has no entry for the requested prompt."""


class ReplayProvider(CompletionProvider):
    """Deterministic provider backed by a {sha256(prompt): [completions]} map."""

    def __init__(self, responses: Dict[str, List[str]]):
        self._responses = dict(responses)

    @classmethod
    def from_file(cls, path) -> "ReplayProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    @classmethod
    def from_prompts(cls, by_prompt: Dict[str, List[str]]) -> "ReplayProvider":
        """Build from full prompt texts instead of precomputed hashes."""
        return cls({prompt_key(p): list(c) for p, c in by_prompt.items()})

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self._responses, fh, indent=2, sort_keys=True)

    def complete(self, prompt: str, temperature: float, n: int) -> List[str]:
        key = prompt_key(prompt)
        if key not in self._responses:
            raise ReplayMissError(f"no replay entry for prompt sha256 {key}")
        stored = self._responses[key]
        if len(stored) < n:
            raise ReplayMissError(
                f"replay entry {key} has {len(stored)} completions, {n} requested"
            )
        return list(stored[:n])


class RecordingProvider(CompletionProvider):
    """Wraps a live provider and captures responses in replay format."""

    def __init__(self, inner: CompletionProvider):
        self.inner = inner
        self.recorded: Dict[str, List[str]] = {}

    def complete(self, prompt: str, temperature: float, n: int) -> List[str]:
        completions = self.inner.complete(prompt, temperature, n)
        self.recorded.setdefault(prompt_key(prompt), []).extend(
            c for c in completions if c not in self.recorded.get(prompt_key(prompt), [])
        )
        return completions

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.recorded, fh, indent=2, sort_keys=True)


class HttpChatProvider(CompletionProvider):
    """OpenAI-compatible chat-completion client; API key via environment."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "KGQA_API_KEY",
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, prompt: str, temperature: float, n: int) -> List[str]:
        api_key = os.environ.get(self.api_key_env, "")
        if not api_key:
            raise ConfigError(f"environment variable {self.api_key_env} is not set")
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
            "n": n,
        }
        try:
            response = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise CompletionTransportError(f"completion request failed: {exc}") from exc
        if response.status_code != 200:
            raise CompletionTransportError(
                f"completion service returned HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            choices = response.json()["choices"]
            completions = [c["message"]["content"] for c in choices]
        except (ValueError, KeyError, TypeError) as exc:
            raise CompletionTransportError(f"bad completion payload: {exc}") from exc
        if len(completions) != n:
            raise CompletionTransportError(
                f"requested {n} completions, got {len(completions)}"
            )
        return completions
