"""Embedding providers and the id-keyed vector table used by graph building.

Three provider kinds: ``hashed`` (a deterministic bag-of-words stand-in for
a neural encoder, used throughout the offline tests), ``file`` (precomputed
vectors), and ``remote`` (a JSON-over-HTTP encoder endpoint).
"""

from __future__ import annotations

import hashlib
import os
import threading
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import httpx
import numpy as np

from .dataset import Sample
from .jsonl import dump_line, read_jsonl, write_text_atomic

PAIR_SEPARATOR = "\n"

EMBED_TOKEN_ENV = "MAPLE_EMBED_TOKEN"


class EmbeddingError(RuntimeError):
    """Provider failure or an inconsistent vector table."""


@dataclass
class EmbeddingTable:
    """Map from sample id to a fixed-dimension vector."""

    dim: int | None
    vectors: dict[str, np.ndarray]

    def vector(self, sample_id: str) -> np.ndarray:
        if sample_id not in self.vectors:
            raise EmbeddingError(f"no embedding for id {sample_id!r}")
        return self.vectors[sample_id]


def relevance(a: np.ndarray, b: np.ndarray) -> float:
    """Dot-product relevance between two embedding vectors."""
    return float(np.dot(a, b))


def embed_hashed(text: str, dim: int, seed: int) -> np.ndarray:
    """Signed bag-of-words hashing into ``dim`` buckets, L2-normalized.

    Tokens are whitespace-split after lowercasing and hashed with a keyed
    64-bit hash, so equal (text, dim, seed) always yields the identical
    vector. Empty or fully cancelling text gives the zero vector.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    vec = np.zeros(dim, dtype=np.float64)
    for token in text.lower().split():
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
        h = int.from_bytes(digest, "little")
        sign = 1.0 if h >> 63 else -1.0
        vec[h % dim] += sign
    norm = np.linalg.norm(vec)
    if norm > 0.0:
        vec /= norm
    return vec


class EmbeddingProvider(Protocol):
    kind: str

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]: ...

    def table_for(self, samples: Sequence[Sample]) -> EmbeddingTable: ...


def embed_pair(query: str, label: str, provider: EmbeddingProvider) -> np.ndarray:
    """Embed a (query, label) pair as one string joined by a newline."""
    return provider.embed_texts([query + PAIR_SEPARATOR + label])[0]


@dataclass
class HashedProvider:
    """Pure-function provider backed by :func:`embed_hashed`."""

    dim: int = 256
    seed: int = 0
    kind: str = field(default="hashed", init=False)

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [embed_hashed(t, self.dim, self.seed) for t in texts]

    def table_for(self, samples: Sequence[Sample]) -> EmbeddingTable:
        return EmbeddingTable(self.dim, {s.id: embed_hashed(s.text, self.dim, self.seed) for s in samples})


class FileProvider:
    """Precomputed vectors keyed by sample id (and, for lookups by text,
    by the exact text those ids carry).

    Cannot embed strings that were not precomputed; adaptive selection
    needs pair embeddings, so use hashed/remote providers there unless the
    file includes them.
    """

    kind = "file"

    def __init__(self, table: EmbeddingTable, samples: Sequence[Sample]):
        self._table = table
        self._by_text: dict[str, np.ndarray] = {}
        for sample in samples:
            if sample.id in table.vectors:
                self._by_text.setdefault(sample.text, table.vectors[sample.id])

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        out = []
        for text in texts:
            if text not in self._by_text:
                raise EmbeddingError(
                    f"file provider has no vector for text {text[:60]!r}; "
                    "precompute it or switch to the hashed/remote provider"
                )
            out.append(self._by_text[text])
        return out

    def table_for(self, samples: Sequence[Sample]) -> EmbeddingTable:
        vectors = {}
        for sample in samples:
            if sample.id not in self._table.vectors:
                raise EmbeddingError(f"no embedding for id {sample.id!r} in the loaded table")
            vectors[sample.id] = self._table.vectors[sample.id]
        return EmbeddingTable(self._table.dim, vectors)


class RemoteProvider:
    """JSON-over-HTTP encoder: POST {"texts": [...]} -> {"vectors": [[...]]}.

    Calls are funneled through a semaphore so at most ``max_in_flight``
    requests are outstanding. The auth token is read from the
    ``MAPLE_EMBED_TOKEN`` environment variable when present.
    """

    kind = "remote"

    def __init__(
        self,
        endpoint: str,
        model: str | None = None,
        batch_size: int = 32,
        max_in_flight: int = 4,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.batch_size = max(1, batch_size)
        self._limiter = threading.Semaphore(max(1, max_in_flight))
        headers = {}
        token = os.environ.get(EMBED_TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def _post_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        payload: dict = {"texts": list(texts)}
        if self.model:
            payload["model"] = self.model
        with self._limiter:
            try:
                response = self._client.post(self.endpoint, json=payload)
                response.raise_for_status()
            except httpx.HTTPError as exc:
                raise EmbeddingError(f"embedding endpoint failed: {exc}") from exc
        body = response.json()
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise EmbeddingError("embedding endpoint returned a malformed 'vectors' field")
        return [np.asarray(v, dtype=np.float64) for v in vectors]

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            out.extend(self._post_batch(texts[start : start + self.batch_size]))
        return out

    def table_for(self, samples: Sequence[Sample]) -> EmbeddingTable:
        vectors = self.embed_texts([s.text for s in samples])
        dim = len(vectors[0]) if vectors else None
        for sample, vec in zip(samples, vectors):
            if len(vec) != dim:
                raise EmbeddingError(f"endpoint returned inconsistent dimensions (id {sample.id!r})")
        return EmbeddingTable(dim, {s.id: v for s, v in zip(samples, vectors)})


def load_embeddings(path: os.PathLike | str) -> EmbeddingTable:
    """Load a JSONL table of {"id": ..., "vector": [...]} rows."""
    dim: int | None = None
    vectors: dict[str, np.ndarray] = {}
    for line_no, record in read_jsonl(path):
        sample_id = record.get("id")
        vector = record.get("vector")
        if not isinstance(sample_id, str) or not isinstance(vector, list):
            raise EmbeddingError(f"{path}:{line_no}: expected fields 'id' and 'vector'")
        if sample_id in vectors:
            raise EmbeddingError(f"{path}:{line_no}: duplicate id {sample_id!r}")
        if dim is None:
            dim = len(vector)
        elif len(vector) != dim:
            raise EmbeddingError(
                f"{path}:{line_no}: vector for id {sample_id!r} has length {len(vector)}, expected {dim}"
            )
        vectors[sample_id] = np.asarray(vector, dtype=np.float64)
    return EmbeddingTable(dim, vectors)


def save_embeddings(path: os.PathLike | str, table: EmbeddingTable) -> None:
    lines = [dump_line({"id": k, "vector": list(map(float, v))}) for k, v in table.vectors.items()]
    write_text_atomic(path, "".join(line + "\n" for line in lines))
