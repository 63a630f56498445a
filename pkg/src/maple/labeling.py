"""LLM clients, batch pseudo-labeling with retries, and the candidate pool.

Two deterministic mock clients make the whole pipeline testable offline:
``mock_fixed`` always answers the same string, ``mock_nearest`` answers with
the label of the most relevant labeled sample, so its behavior tracks the
embedding geometry the selection stages operate on.
"""

from __future__ import annotations

import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Protocol, Sequence

import httpx
import numpy as np

from .dataset import SOURCE_HUMAN, SOURCE_PSEUDO, Sample
from .embedding import EmbeddingProvider
from .jsonl import read_jsonl, write_jsonl_atomic

LLM_TOKEN_ENV = "MAPLE_LLM_TOKEN"


class ClientError(RuntimeError):
    """Transport failure or unusable response from an LLM client."""


class LabelingError(ValueError):
    """Invalid pseudo-labeling input or pool assembly."""


class LLMClient(Protocol):
    kind: str
    deterministic: bool

    def generate(self, prompt: str, *, query_text: str | None = None) -> str: ...


@dataclass
class FixedResponseClient:
    """Always answers with one fixed string."""

    label: str
    kind: str = field(default="mock_fixed", init=False)
    deterministic: bool = field(default=True, init=False)

    def generate(self, prompt: str, *, query_text: str | None = None) -> str:
        return self.label


class NearestLabelClient:
    """Answers with the label of the highest-relevance labeled sample
    (ties by ascending id)."""

    kind = "mock_nearest"
    deterministic = True

    def __init__(self, labeled: Sequence[Sample], provider: EmbeddingProvider):
        if not labeled:
            raise LabelingError("mock_nearest needs a non-empty labeled set")
        self._labeled = list(labeled)
        self._provider = provider
        self._vectors = np.stack(provider.embed_texts([s.text for s in labeled]))

    def generate(self, prompt: str, *, query_text: str | None = None) -> str:
        text = query_text if query_text is not None else prompt
        query_vec = self._provider.embed_texts([text])[0]
        scores = self._vectors @ query_vec
        best = sorted(
            range(len(self._labeled)), key=lambda i: (-scores[i], self._labeled[i].id)
        )[0]
        label = self._labeled[best].label
        assert label is not None
        return label


class RemoteLLMClient:
    """JSON-over-HTTP completion: POST {"prompt": ...} -> {"text": ...}.

    Requests are sent with temperature 0; the auth token comes from the
    ``MAPLE_LLM_TOKEN`` environment variable when set.
    """

    kind = "remote"
    deterministic = False

    def __init__(
        self,
        endpoint: str,
        model: str | None = None,
        temperature: float = 0.0,
        max_in_flight: int = 4,
        timeout: float = 120.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self._limiter = threading.Semaphore(max(1, max_in_flight))
        headers = {}
        token = os.environ.get(LLM_TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def generate(self, prompt: str, *, query_text: str | None = None) -> str:
        payload: dict = {"prompt": prompt, "temperature": self.temperature}
        if self.model:
            payload["model"] = self.model
        with self._limiter:
            try:
                response = self._client.post(self.endpoint, json=payload)
                response.raise_for_status()
            except httpx.HTTPError as exc:
                raise ClientError(f"LLM endpoint failed: {exc}") from exc
        text = response.json().get("text")
        if not isinstance(text, str):
            raise ClientError("LLM endpoint returned no 'text' field")
        return text


@dataclass
class RetryPolicy:
    """Exponential backoff with seeded jitter; ``budget`` is total attempts."""

    budget: int = 3
    base_delay: float = 0.5
    max_delay: float = 8.0
    jitter_seed: int = 0
    sleep: Callable[[float], None] = time.sleep

    def __post_init__(self):
        self._rng = random.Random(self.jitter_seed)

    def delay(self, attempt: int) -> float:
        backoff = min(self.max_delay, self.base_delay * 2 ** (attempt - 1))
        return backoff * (1.0 + 0.25 * self._rng.random())


def with_retries(call: Callable[[], str], policy: RetryPolicy) -> tuple[str, int]:
    """Run ``call``, retrying ClientError; returns (value, retries used)."""
    if policy.budget < 1:
        raise ValueError("retry budget must allow at least one attempt")
    for attempt in range(1, policy.budget + 1):
        try:
            return call(), attempt - 1
        except ClientError:
            if attempt == policy.budget:
                raise
            policy.sleep(policy.delay(attempt))
    raise AssertionError("unreachable")


@dataclass
class PseudoLabelResult:
    sample: Sample
    label: str
    response: str
    retries: int


@dataclass
class PseudoBatch:
    results: list[PseudoLabelResult]
    failures: list[tuple[str, str]]


def pseudo_label(
    client: LLMClient,
    samples: Sequence[Sample],
    prompt_for: Callable[[Sample], str] | None = None,
    *,
    retry: RetryPolicy | None = None,
    strict: bool = False,
    max_in_flight: int = 1,
) -> PseudoBatch:
    """Label each sample once via the client, keeping raw transcripts.

    Failures that survive the retry budget are collected per sample (or
    raised immediately in strict mode). Results come back in input order
    regardless of the in-flight limit.
    """
    for sample in samples:
        if sample.label is not None:
            raise LabelingError(f"sample {sample.id!r} already has a label")
    prompt_for = prompt_for or (lambda s: s.text)
    retry = retry or RetryPolicy()

    def label_one(sample: Sample) -> PseudoLabelResult | tuple[str, str]:
        def call() -> str:
            response = client.generate(prompt_for(sample), query_text=sample.text)
            if not response.strip():
                raise ClientError("empty response")
            return response

        try:
            response, retries = with_retries(call, retry)
        except ClientError as exc:
            if strict:
                raise LabelingError(f"pseudo-labeling {sample.id!r} failed: {exc}") from exc
            return (sample.id, str(exc))
        return PseudoLabelResult(sample, response.strip(), response, retries)

    if max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            outcomes = list(pool.map(label_one, samples))
    else:
        outcomes = [label_one(s) for s in samples]

    batch = PseudoBatch([], [])
    for outcome in outcomes:
        if isinstance(outcome, PseudoLabelResult):
            batch.results.append(outcome)
        else:
            batch.failures.append(outcome)
    return batch


@dataclass
class CandidatePool:
    """The demonstration pool: human-labeled entries first, then pseudo-labeled
    ones, with the raw LLM transcript kept per pseudo entry."""

    entries: tuple[Sample, ...]
    transcripts: dict[str, str]

    def ids(self) -> list[str]:
        return [entry.id for entry in self.entries]


def assemble_pool(
    labeled: Sequence[Sample], pseudo: Sequence[PseudoLabelResult]
) -> CandidatePool:
    """Merge human-labeled samples with pseudo-labeling results."""
    entries: list[Sample] = []
    seen: set[str] = set()
    for sample in labeled:
        if sample.label is None:
            raise LabelingError(f"labeled sample {sample.id!r} has no label")
        if sample.id in seen:
            raise LabelingError(f"duplicate id in pool: {sample.id!r}")
        seen.add(sample.id)
        entries.append(replace(sample, source=SOURCE_HUMAN))
    transcripts: dict[str, str] = {}
    for result in pseudo:
        if result.sample.id in seen:
            raise LabelingError(f"duplicate id in pool: {result.sample.id!r}")
        seen.add(result.sample.id)
        entries.append(replace(result.sample, label=result.label, source=SOURCE_PSEUDO))
        transcripts[result.sample.id] = result.response
    return CandidatePool(tuple(entries), transcripts)


def save_pool(path: os.PathLike | str, pool: CandidatePool) -> None:
    records = []
    for entry in pool.entries:
        record = {"id": entry.id, "text": entry.text, "label": entry.label, "source": entry.source}
        if entry.id in pool.transcripts:
            record["transcript"] = pool.transcripts[entry.id]
        records.append(record)
    write_jsonl_atomic(path, records)


def load_pool(path: os.PathLike | str) -> CandidatePool:
    entries: list[Sample] = []
    transcripts: dict[str, str] = {}
    for line_no, record in read_jsonl(path):
        source = record.get("source")
        if source not in (SOURCE_HUMAN, SOURCE_PSEUDO):
            raise LabelingError(f"{path}:{line_no}: bad source {source!r}")
        entries.append(Sample(record["id"], record["text"], record["label"], source))
        if "transcript" in record:
            transcripts[record["id"]] = record["transcript"]
    return CandidatePool(tuple(entries), transcripts)
