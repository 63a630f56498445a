"""Shared builders for tests: hand-wired graphs, random graphs, stub providers."""

from __future__ import annotations

import numpy as np

from maple.dataset import Sample
from maple.embedding import EmbeddingTable
from maple.graph import RelevanceGraph, build_knn_graph


def graph_from_edges(
    n: int, edges: list[tuple[int, int]], ids: list[str] | None = None,
    weights: dict[tuple[int, int], float] | None = None,
) -> RelevanceGraph:
    """Build a RelevanceGraph directly from an undirected edge list."""
    ids = ids if ids is not None else [f"n{i}" for i in range(n)]
    adjacency: list[list[int]] = [[] for _ in range(n)]
    edge_weights: dict[tuple[int, int], float] = {}
    for u, v in edges:
        a, b = min(u, v), max(u, v)
        adjacency[u].append(v)
        adjacency[v].append(u)
        edge_weights[(a, b)] = (weights or {}).get((a, b), 1.0)
    for neighbors in adjacency:
        neighbors.sort()
    return RelevanceGraph(n, ids, adjacency, edge_weights, 2.0 * len(edge_weights) / n)


PATH_FIXTURE = graph_from_edges(4, [(0, 2), (1, 2), (2, 3)], ["L1", "L2", "u1", "u2"])
FOUR_CYCLE = graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], ["v0", "v1", "v2", "v3"])


def random_graph_and_k(seed: int, max_n: int = 10) -> tuple[RelevanceGraph, int]:
    """Seeded random kNN graph with n in [2, max_n] and k in [1, n-1]."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    k = int(rng.integers(1, n))
    dim = int(rng.integers(2, 6))
    vectors = rng.normal(size=(n, dim))
    ids = [f"n{i:02d}" for i in range(n)]
    table = EmbeddingTable(dim, {i: v for i, v in zip(ids, vectors)})
    return build_knn_graph(table, ids, k), k


def random_graph(seed: int, max_n: int = 10) -> RelevanceGraph:
    return random_graph_and_k(seed, max_n)[0]


class StubProvider:
    """Embedding provider with a fixed text -> vector mapping."""

    kind = "stub"

    def __init__(self, mapping: dict[str, np.ndarray]):
        self.mapping = {k: np.asarray(v, dtype=np.float64) for k, v in mapping.items()}

    def embed_texts(self, texts):
        return [self.mapping[t] for t in texts]

    def table_for(self, samples):
        dim = len(next(iter(self.mapping.values())))
        return EmbeddingTable(dim, {s.id: self.mapping[s.text] for s in samples})


def sample(sample_id: str, text: str, label: str | None = None, source: str = "human") -> Sample:
    return Sample(sample_id, text, label, source)


def demo_blocks(prompt: str) -> int:
    """Number of demonstration blocks in a rendered prompt.

    Prompts are paragraph-joined as header, demos..., lead-in, query line
    (the query block carries its own internal blank line)."""
    return len(prompt.split("\n\n")) - 3


def rankings_with_ties(records) -> list[list[str]]:
    """Sorted ids grouped into tie classes by exact score equality."""
    ordered = sorted(records, key=lambda r: (-r.score, r.sample_id))
    groups: list[list[str]] = []
    current: list[str] = []
    current_score = None
    for record in ordered:
        if current and record.score != current_score:
            groups.append(current)
            current = []
        current_score = record.score
        current.append(record.sample_id)
    if current:
        groups.append(current)
    return groups
