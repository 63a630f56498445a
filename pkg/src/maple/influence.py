"""Influence scoring over the relevance graph and the two selection steps:
top-P of the unlabeled pool for pseudo-labeling, and per-query adaptive
demonstration selection.

A node's influence on a target set combines the log geometric mean of
shortest-path counts with the mean shortest-path distance scaled by the
log mean degree; see :func:`influence_score`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import Sample
from .embedding import EmbeddingProvider, embed_pair
from .graph import UNREACHABLE, RelevanceGraph, bfs_paths, build_graph_from_relevance
from .labeling import CandidatePool

NEG_INFINITY = float("-inf")


@dataclass
class InfluenceRecord:
    """Score of one candidate node plus its components.

    ``mean_dist`` and ``log_geo_paths`` are averaged over the reachable
    targets only and are None when nothing is reachable; ``score`` is
    NEG_INFINITY as soon as any target is unreachable.
    """

    node: int
    sample_id: str
    score: float
    mean_dist: float | None
    log_geo_paths: float | None
    reachable_targets: int


@dataclass
class SelectionResult:
    chosen: list[str]
    scores: dict[str, InfluenceRecord]
    fallback_used: bool


def influence_score(
    dists: Sequence[int | None],
    counts: Sequence[int],
    d: float,
    *,
    base: float | None = None,
) -> float:
    """Mean log path count minus log(d) times mean hop distance.

    ``base=None`` uses the natural logarithm (the production setting; any
    base gives the same ranking, a property the tests assert).
    """
    if len(dists) != len(counts):
        raise ValueError(f"length mismatch: {len(dists)} dists vs {len(counts)} counts")
    if not dists:
        raise ValueError("at least one target is required")
    if d < 1.0:
        raise ValueError(f"mean degree must be >= 1, got {d}")
    log = math.log if base is None else (lambda x: math.log(x, base))
    total_log_counts = 0.0
    total_dist = 0
    for dist, count in zip(dists, counts):
        if dist is UNREACHABLE:
            return NEG_INFINITY
        if count < 1:
            raise ValueError(f"reachable target with path count {count}")
        total_log_counts += log(count)
        total_dist += dist
    m = len(dists)
    return total_log_counts / m - log(d) * (total_dist / m)


def score_unlabeled(
    graph: RelevanceGraph,
    labeled_indices: Sequence[int],
    unlabeled_indices: Sequence[int],
    *,
    base: float | None = None,
) -> list[InfluenceRecord]:
    """Score every unlabeled node against the whole labeled set.

    Runs one BFS per labeled node and reuses the traversals for all
    candidates; ``d`` is the graph's mean degree.
    """
    if not labeled_indices:
        raise ValueError("labeled index set is empty")
    if set(labeled_indices) & set(unlabeled_indices):
        raise ValueError("labeled and unlabeled index sets overlap")
    stats = [bfs_paths(graph, source) for source in labeled_indices]
    records = []
    for node in unlabeled_indices:
        dists = [s.dist[node] for s in stats]
        counts = [s.count[node] for s in stats]
        records.append(_record_for(graph, node, dists, counts, base=base))
    return records


def _record_for(
    graph: RelevanceGraph,
    node: int,
    dists: Sequence[int | None],
    counts: Sequence[int],
    *,
    base: float | None = None,
) -> InfluenceRecord:
    log = math.log if base is None else (lambda x: math.log(x, base))
    reachable = [(d, c) for d, c in zip(dists, counts) if d is not UNREACHABLE]
    if reachable:
        mean_dist = sum(d for d, _ in reachable) / len(reachable)
        log_geo = sum(log(c) for _, c in reachable) / len(reachable)
    else:
        mean_dist = None
        log_geo = None
    if len(reachable) == len(dists):
        score = influence_score(dists, counts, graph.mean_degree, base=base)
    else:
        score = NEG_INFINITY
    return InfluenceRecord(node, graph.node_ids[node], score, mean_dist, log_geo, len(reachable))


def _rank_with_fallback(
    records: Sequence[InfluenceRecord],
    take: int,
    fallback_relevance: Mapping[str, float] | None,
) -> tuple[list[str], bool]:
    """Finite scores first (descending, ties by id); NEG_INFINITY candidates
    fill any remainder, ranked by descending fallback relevance then id."""
    finite = sorted(
        (r for r in records if r.score != NEG_INFINITY),
        key=lambda r: (-r.score, r.sample_id),
    )
    ranked = [r.sample_id for r in finite]
    fallback_used = False
    if len(ranked) < take:
        relevance = fallback_relevance or {}
        stranded = sorted(
            (r for r in records if r.score == NEG_INFINITY),
            key=lambda r: (-relevance.get(r.sample_id, NEG_INFINITY), r.sample_id),
        )
        ranked.extend(r.sample_id for r in stranded)
        fallback_used = take > len(finite)
    return ranked[:take], fallback_used


def select_top_p(
    records: Sequence[InfluenceRecord],
    p: int,
    fallback_relevance: Mapping[str, float] | None = None,
) -> SelectionResult:
    """Top-P candidates by (score desc, id asc), clamped to what exists."""
    if p < 1:
        raise ValueError(f"P must be >= 1, got {p}")
    if not records:
        raise ValueError("no candidate records to select from")
    take = min(p, len(records))
    chosen, fallback_used = _rank_with_fallback(records, take, fallback_relevance)
    return SelectionResult(chosen, {r.sample_id: r for r in records}, fallback_used)


def adaptive_count(pool_size: int, alpha: float) -> int:
    """Number of demonstrations kept per query: floor(alpha * (pool+1)),
    clamped to [1, pool]."""
    return max(1, min(pool_size, math.floor(alpha * (pool_size + 1))))


def select_adaptive(
    pool: CandidatePool,
    test: Sample,
    provider: EmbeddingProvider,
    k: int,
    alpha: float,
) -> SelectionResult:
    """Influence-ranked demonstrations for one test query.

    Builds a top-k graph over the pool plus the test node. Pool members
    relate to each other through their (query, label) pair embeddings;
    any edge involving the test node is scored on plain query embeddings,
    since the test query has no label. One BFS from the test node then
    scores each member with the single-target influence formula, and the
    top ``adaptive_count(|pool|, alpha)`` are kept.
    """
    if not pool.entries:
        raise ValueError("candidate pool is empty")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")

    entries = pool.entries
    pool_n = len(entries)
    pair_vecs = np.stack([embed_pair(e.text, e.label or "", provider) for e in entries])
    query_vecs = np.stack(provider.embed_texts([e.text for e in entries] + [test.text]))

    n = pool_n + 1
    scores = np.zeros((n, n), dtype=np.float64)
    scores[:pool_n, :pool_n] = pair_vecs @ pair_vecs.T
    test_edge = query_vecs[:pool_n] @ query_vecs[pool_n]
    scores[:pool_n, pool_n] = test_edge
    scores[pool_n, :pool_n] = test_edge

    node_ids = [e.id for e in entries] + [test.id]
    graph = build_graph_from_relevance(scores, node_ids, k)
    stats = bfs_paths(graph, pool_n)

    records = [
        _record_for(graph, i, [stats.dist[i]], [stats.count[i]]) for i in range(pool_n)
    ]
    m = adaptive_count(pool_n, alpha)
    fallback = {entries[i].id: float(test_edge[i]) for i in range(pool_n)}
    chosen, fallback_used = _rank_with_fallback(records, m, fallback)
    return SelectionResult(chosen, {r.sample_id: r for r in records}, fallback_used)
