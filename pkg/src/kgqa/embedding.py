"""Text embedding providers and an exact cosine similarity index.

The default provider hashes character trigrams of normalized text into a
fixed-width signed-count vector and L2-normalizes it.  It is fully offline
and bit-deterministic across runs and platforms, which the acceptance and
replay tests rely on.  An HTTP client for a remote embedding service is a
drop-in alternative behind the same interface.
"""

from __future__ import annotations

import hashlib
import json
import re
from typing import List, Sequence

import numpy as np
import requests

from .errors import DataError, TransportError

_NORMALIZE_RE = re.compile(r"[^a-z0-9]+")


class EmbeddingProvider:
    """Interface: embed(text) -> unit-normalized vector of fixed dimension."""

    dimension: int

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([self.embed(t) for t in texts]) if texts else np.zeros((0, self.dimension))

    def fingerprint(self) -> str:
        raise NotImplementedError


def _normalize_text(text: str) -> str:
    return _NORMALIZE_RE.sub(" ", text.lower()).strip()


def _trigrams(text: str) -> List[str]:
    padded = f" {text} "
    return [padded[i : i + 3] for i in range(len(padded) - 2)]


class TrigramHashEmbedder(EmbeddingProvider):
    """Signed-hash character-trigram counts, L2-normalized (default dim 512)."""

    def __init__(self, dimension: int = 512):
        if dimension < 8:
            raise ValueError("dimension must be at least 8")
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        normalized = _normalize_text(text)
        grams = _trigrams(normalized) if normalized else _trigrams(text or "?")
        vec = np.zeros(self.dimension, dtype=np.float64)
        for gram in grams:
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
            code = int.from_bytes(digest, "big")
            idx = code % self.dimension
            sign = 1.0 if (code >> 61) & 1 else -1.0
            vec[idx] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return vec / norm

    def fingerprint(self) -> str:
        return f"trigram-hash-v1-d{self.dimension}"


class HttpEmbedder(EmbeddingProvider):
    """Client for a JSON embedding service: {"texts": [...]} -> {"vectors": [[...]]}."""

    def __init__(self, endpoint: str, dimension: int, timeout: float = 30.0):
        self.endpoint = endpoint
        self.dimension = dimension
        self.timeout = timeout

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension))
        try:
            response = requests.post(
                self.endpoint, json={"texts": list(texts)}, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"embedding service failed: {exc}") from exc
        if response.status_code != 200:
            raise TransportError(f"embedding service returned HTTP {response.status_code}")
        try:
            vectors = np.asarray(response.json()["vectors"], dtype=np.float64)
        except (ValueError, KeyError, TypeError) as exc:
            raise TransportError(f"bad embedding payload: {exc}") from exc
        if vectors.shape != (len(texts), self.dimension):
            raise TransportError(f"embedding shape {vectors.shape} does not match request")
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        return vectors / norms

    def fingerprint(self) -> str:
        return f"http-{self.endpoint}-d{self.dimension}"


class SimilarityIndex:
    """Exact top-k cosine retrieval over entity surface names and relation names.

    Results are sorted by similarity descending with ties broken by id
    ascending.  The index is immutable after construction.
    """

    def __init__(
        self,
        entity_ids: Sequence[str],
        entity_names: Sequence[str],
        entity_classes: Sequence[frozenset],
        entity_vectors: np.ndarray,
        relation_ids: Sequence[str],
        relation_vectors: np.ndarray,
        embedder: EmbeddingProvider,
    ):
        self.entity_ids = list(entity_ids)
        self.entity_names = list(entity_names)
        self.entity_classes = list(entity_classes)
        self.entity_vectors = np.asarray(entity_vectors, dtype=np.float64)
        self.relation_ids = list(relation_ids)
        self.relation_vectors = np.asarray(relation_vectors, dtype=np.float64)
        self.embedder = embedder

    @property
    def n_entities(self) -> int:
        return len(self.entity_ids)

    @property
    def n_relations(self) -> int:
        return len(self.relation_ids)

    def classes_of(self, entity_id: str) -> frozenset:
        return self.entity_classes[self.entity_ids.index(entity_id)]

    def _top_k(self, ids, matrix, text, k):
        if not ids or k < 1:
            return []
        sims = matrix @ self.embedder.embed(text)
        order = sorted(range(len(ids)), key=lambda i: (-sims[i], ids[i]))
        return [(ids[i], float(sims[i])) for i in order[:k]]

    def entity_top_k(self, text: str, k: int):
        return self._top_k(self.entity_ids, self.entity_vectors, text, k)

    def relation_top_k(self, text: str, k: int):
        return self._top_k(self.relation_ids, self.relation_vectors, text, k)

    def relation_similarities(self, text: str) -> dict:
        if not self.relation_ids:
            return {}
        sims = self.relation_vectors @ self.embedder.embed(text)
        return {rid: float(s) for rid, s in zip(self.relation_ids, sims)}

    # -- persistence: JSON header line + raw float32 vector blob ------------

    def save(self, path) -> None:
        header = {
            "dimension": self.embedder.dimension,
            "fingerprint": self.embedder.fingerprint(),
            "entities": [
                {"id": eid, "name": name, "classes": sorted(classes)}
                for eid, name, classes in zip(self.entity_ids, self.entity_names, self.entity_classes)
            ],
            "relations": self.relation_ids,
        }
        with open(path, "wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
            fh.write(self.entity_vectors.astype(np.float32).tobytes())
            fh.write(self.relation_vectors.astype(np.float32).tobytes())

    @classmethod
    def load(cls, path, embedder: EmbeddingProvider) -> "SimilarityIndex":
        with open(path, "rb") as fh:
            header_line = fh.readline()
            blob = fh.read()
        try:
            header = json.loads(header_line)
        except ValueError as exc:
            raise DataError(f"bad index header in {path}: {exc}") from exc
        if header.get("fingerprint") != embedder.fingerprint():
            raise DataError(
                f"index was built with {header.get('fingerprint')!r}, "
                f"not {embedder.fingerprint()!r}"
            )
        dim = header["dimension"]
        n_ent = len(header["entities"])
        n_rel = len(header["relations"])
        data = np.frombuffer(blob, dtype=np.float32)
        if data.size != (n_ent + n_rel) * dim:
            raise DataError(f"index blob size mismatch in {path}")
        entity_vecs = data[: n_ent * dim].reshape(n_ent, dim).astype(np.float64)
        relation_vecs = data[n_ent * dim :].reshape(n_rel, dim).astype(np.float64)
        return cls(
            entity_ids=[e["id"] for e in header["entities"]],
            entity_names=[e["name"] for e in header["entities"]],
            entity_classes=[frozenset(e["classes"]) for e in header["entities"]],
            entity_vectors=entity_vecs,
            relation_ids=list(header["relations"]),
            relation_vectors=relation_vecs,
            embedder=embedder,
        )
