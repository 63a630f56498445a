"""Top-k relevance graph plus BFS shortest-path distances and counts.

The graph is built row-wise (each node keeps its k most relevant peers,
ties broken by ascending node index) and then symmetrized by union, giving
an undirected simple graph. Path statistics are hop-count based; edge
weights are kept for inspection only and never consulted by traversal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import EmbeddingTable

# Sentinel for "no path"; identity-checked (`dist[i] is UNREACHABLE`).
UNREACHABLE = None

ORACLE_MAX_NODES = 14


class GraphError(ValueError):
    """Invalid graph construction input."""


@dataclass
class RelevanceGraph:
    """Undirected simple graph over sample nodes.

    ``adjacency[i]`` is the sorted list of neighbor indices of node ``i``;
    ``weights`` maps each undirected edge ``(u, v)`` with ``u < v`` to its
    relevance value.
    """

    n: int
    node_ids: list[str]
    adjacency: list[list[int]]
    weights: dict[tuple[int, int], float]
    mean_degree: float


@dataclass
class PathStats:
    """Per-node hop distance and number of distinct shortest paths from one source."""

    source: int
    dist: list[int | None]
    count: list[int]


def build_graph_from_relevance(
    scores: np.ndarray, node_ids: Sequence[str], k: int
) -> RelevanceGraph:
    """Union-symmetrized top-k graph from a full pairwise relevance matrix.

    Per row, the k largest off-diagonal entries are kept (k clamped to
    n-1); exact ties resolve to the lower node index.
    """
    n = len(node_ids)
    if n < 2:
        raise GraphError(f"need at least 2 nodes, got {n}")
    if k < 1:
        raise GraphError(f"k must be >= 1, got {k}")
    if scores.shape != (n, n):
        raise GraphError(f"relevance matrix shape {scores.shape} does not match {n} ids")
    if len(set(node_ids)) != n:
        raise GraphError("node ids must be unique")

    k_eff = min(k, n - 1)
    masked = scores.astype(np.float64, copy=True)
    np.fill_diagonal(masked, -np.inf)
    # Stable sort on the negated scores keeps ascending index among ties.
    order = np.argsort(-masked, axis=1, kind="stable")[:, :k_eff]

    edges: set[tuple[int, int]] = set()
    for i in range(n):
        for j in order[i]:
            edges.add((min(i, int(j)), max(i, int(j))))

    adjacency: list[list[int]] = [[] for _ in range(n)]
    weights: dict[tuple[int, int], float] = {}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
        weights[(u, v)] = float(scores[u, v])
    for neighbors in adjacency:
        neighbors.sort()

    return RelevanceGraph(n, list(node_ids), adjacency, weights, 2.0 * len(edges) / n)


def build_knn_graph(table: EmbeddingTable, ids: Sequence[str], k: int) -> RelevanceGraph:
    """Top-k graph over ``ids`` with dot-product relevance from ``table``."""
    if len(ids) < 2:
        raise GraphError(f"need at least 2 nodes, got {len(ids)}")
    vectors = np.stack([table.vector(i) for i in ids])
    return build_graph_from_relevance(vectors @ vectors.T, ids, k)


def mean_degree(graph: RelevanceGraph) -> float:
    """2|E|/n on the symmetrized simple graph."""
    return 2.0 * len(graph.weights) / graph.n


def bfs_paths(graph: RelevanceGraph, source: int) -> PathStats:
    """Level-order traversal accumulating shortest-path counts.

    ``count[w]`` sums ``count[v]`` over neighbors ``v`` one level closer
    to the source; unreachable nodes keep (UNREACHABLE, 0).
    """
    if not 0 <= source < graph.n:
        raise GraphError(f"source {source} out of range for {graph.n} nodes")
    dist: list[int | None] = [UNREACHABLE] * graph.n
    count = [0] * graph.n
    dist[source] = 0
    count[source] = 1
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.adjacency[v]:
            if dist[w] is UNREACHABLE:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                count[w] += count[v]
    return PathStats(source, dist, count)


def oracle_paths(
    graph: RelevanceGraph, source: int, target: int
) -> tuple[int | None, int]:
    """Shortest-path length and count by simple-path enumeration.

    Test oracle only: enumerates simple paths by increasing length, so it
    shares no machinery with bfs_paths. Guarded to small graphs.
    """
    if graph.n > ORACLE_MAX_NODES:
        raise GraphError(f"oracle limited to {ORACLE_MAX_NODES} nodes, got {graph.n}")
    if not 0 <= source < graph.n or not 0 <= target < graph.n:
        raise GraphError("source or target out of range")
    if source == target:
        return 0, 1

    def paths_of_length(node: int, remaining: int, visited: set[int]) -> int:
        if remaining == 0:
            return 1 if node == target else 0
        total = 0
        for nxt in graph.adjacency[node]:
            if nxt not in visited:
                total += paths_of_length(nxt, remaining - 1, visited | {nxt})
        return total

    for length in range(1, graph.n):
        found = paths_of_length(source, length, {source})
        if found:
            return length, found
    return UNREACHABLE, 0


def graph_to_json(graph: RelevanceGraph) -> dict:
    edges = [[u, v, graph.weights[(u, v)]] for u, v in sorted(graph.weights)]
    return {"node_ids": graph.node_ids, "edges": edges, "mean_degree": graph.mean_degree}


def graph_from_json(payload: dict) -> RelevanceGraph:
    node_ids = list(payload["node_ids"])
    n = len(node_ids)
    adjacency: list[list[int]] = [[] for _ in range(n)]
    weights: dict[tuple[int, int], float] = {}
    for u, v, w in payload["edges"]:
        adjacency[u].append(v)
        adjacency[v].append(u)
        weights[(int(u), int(v))] = float(w)
    for neighbors in adjacency:
        neighbors.sort()
    return RelevanceGraph(n, node_ids, adjacency, weights, float(payload["mean_degree"]))
