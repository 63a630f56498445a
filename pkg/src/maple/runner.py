"""End-to-end pipeline: pseudo-label selection, pool assembly, per-query
demonstration selection, prompting, inference, and metrics.

Strategies: ``maple`` (influence-based selection at both stages), the
``random`` / ``rag`` / ``rag_adapt`` baselines, and the ``few_shot`` /
``zero_shot`` references. ``mode=fixed`` replaces per-query adaptive
selection with one shared demonstration set so the prompt prefix is
cacheable.
"""

from __future__ import annotations

import hashlib
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from .dataset import Dataset, Sample
from .embedding import (
    EmbeddingProvider,
    FileProvider,
    HashedProvider,
    RemoteProvider,
    load_embeddings,
)
from .graph import RelevanceGraph, build_knn_graph
from .influence import (
    NEG_INFINITY,
    InfluenceRecord,
    SelectionResult,
    adaptive_count,
    score_unlabeled,
    select_adaptive,
    select_top_p,
)
from .labeling import (
    CandidatePool,
    FixedResponseClient,
    LLMClient,
    NearestLabelClient,
    RemoteLLMClient,
    RetryPolicy,
    assemble_pool,
    pseudo_label,
    with_retries,
)
from .metrics import Metric, accuracy, extract_choice, rouge_l
from .prompting import (
    TASK_MULTIPLE_CHOICE,
    TASK_SUMMARIZATION,
    OrderPolicy,
    default_template,
    order_demos,
    render_prompt,
)

logger = logging.getLogger(__name__)

STRATEGY_MAPLE = "maple"
STRATEGY_RANDOM = "random"
STRATEGY_RAG = "rag"
STRATEGY_RAG_ADAPT = "rag_adapt"
STRATEGY_FEW_SHOT = "few_shot"
STRATEGY_ZERO_SHOT = "zero_shot"
STRATEGIES = (
    STRATEGY_MAPLE,
    STRATEGY_RANDOM,
    STRATEGY_RAG,
    STRATEGY_RAG_ADAPT,
    STRATEGY_FEW_SHOT,
    STRATEGY_ZERO_SHOT,
)

MODE_ADAPTIVE = "adaptive"
MODE_FIXED = "fixed"
MODES = (MODE_ADAPTIVE, MODE_FIXED)


class ConfigError(ValueError):
    pass


@dataclass
class EmbedderConfig:
    kind: str = "hashed"
    dim: int = 256
    seed: int | None = None  # defaults to the run seed
    path: str | None = None
    endpoint: str | None = None
    model: str | None = None
    batch_size: int = 32
    max_in_flight: int = 4


@dataclass
class ClientConfig:
    kind: str = "mock_fixed"
    label: str = ""
    endpoint: str | None = None
    model: str | None = None
    max_in_flight: int = 4


@dataclass
class DataPaths:
    labeled: str | None = None
    unlabeled: str | None = None
    test: str | None = None


@dataclass
class RunConfig:
    """Everything one run needs; mirrors the JSON config file."""

    task: str
    strategy: str = STRATEGY_MAPLE
    mode: str = MODE_ADAPTIVE
    k: int = 20
    alpha: float = 0.75
    pseudo_budget: int = 0
    seed: int = 0
    classes: tuple[str, ...] | None = None
    order: OrderPolicy = field(default_factory=OrderPolicy)
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)
    labeler: ClientConfig = field(default_factory=ClientConfig)
    inference: ClientConfig = field(default_factory=ClientConfig)
    data: DataPaths = field(default_factory=DataPaths)
    out_dir: str | None = None
    concurrency: int = 4
    pseudo_label_with_context: bool = False
    strict_labeling: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.pseudo_budget < 0:
            raise ConfigError(f"pseudo_budget must be >= 0, got {self.pseudo_budget}")
        if self.strategy in (STRATEGY_ZERO_SHOT, STRATEGY_FEW_SHOT) and self.pseudo_budget:
            logger.info("strategy %s forces pseudo_budget=0", self.strategy)
            self.pseudo_budget = 0

    @property
    def embedder_seed(self) -> int:
        return self.seed if self.embedder.seed is None else self.embedder.seed


def config_from_dict(payload: Mapping) -> RunConfig:
    """Build a RunConfig from parsed JSON, rejecting unknown keys."""

    def build(cls, data: Mapping, context: str):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown {context} config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    payload = dict(payload)
    if "task" not in payload:
        raise ConfigError("config is missing required key 'task'")
    for key, cls in (("embedder", EmbedderConfig), ("labeler", ClientConfig),
                     ("inference", ClientConfig), ("data", DataPaths)):
        if key in payload:
            payload[key] = build(cls, payload[key], key)
    if "order" in payload:
        payload["order"] = build(OrderPolicy, payload["order"], "order")
    if "classes" in payload and payload["classes"] is not None:
        payload["classes"] = tuple(payload["classes"])
    return build(RunConfig, payload, "run")


def config_to_dict(config: RunConfig) -> dict:
    return {
        "task": config.task,
        "strategy": config.strategy,
        "mode": config.mode,
        "k": config.k,
        "alpha": config.alpha,
        "pseudo_budget": config.pseudo_budget,
        "seed": config.seed,
        "classes": list(config.classes) if config.classes else None,
        "order": {"group_order": config.order.group_order, "within_group": config.order.within_group},
        "embedder": config.embedder.__dict__.copy(),
        "labeler": config.labeler.__dict__.copy(),
        "inference": config.inference.__dict__.copy(),
        "data": config.data.__dict__.copy(),
        "out_dir": config.out_dir,
        "concurrency": config.concurrency,
        "pseudo_label_with_context": config.pseudo_label_with_context,
        "strict_labeling": config.strict_labeling,
    }


def make_provider(config: RunConfig, dataset: Dataset) -> EmbeddingProvider:
    cfg = config.embedder
    if cfg.kind == "hashed":
        return HashedProvider(dim=cfg.dim, seed=config.embedder_seed)
    if cfg.kind == "file":
        if not cfg.path:
            raise ConfigError("file embedder needs 'path'")
        return FileProvider(load_embeddings(cfg.path), dataset.all_samples())
    if cfg.kind == "remote":
        if not cfg.endpoint:
            raise ConfigError("remote embedder needs 'endpoint'")
        return RemoteProvider(
            cfg.endpoint, model=cfg.model, batch_size=cfg.batch_size, max_in_flight=cfg.max_in_flight
        )
    raise ConfigError(f"unknown embedder kind {cfg.kind!r}")


def make_client(cfg: ClientConfig, dataset: Dataset, provider: EmbeddingProvider) -> LLMClient:
    if cfg.kind == "mock_fixed":
        return FixedResponseClient(cfg.label)
    if cfg.kind == "mock_nearest":
        return NearestLabelClient(dataset.labeled, provider)
    if cfg.kind == "remote":
        if not cfg.endpoint:
            raise ConfigError("remote LLM client needs 'endpoint'")
        return RemoteLLMClient(cfg.endpoint, model=cfg.model, max_in_flight=cfg.max_in_flight)
    raise ConfigError(f"unknown LLM client kind {cfg.kind!r}")


# ---------------------------------------------------------------------------
# Stage 1: choose which unlabeled samples get pseudo-labeled.


def run_baseline_selection(
    strategy: str,
    dataset: Dataset,
    provider: EmbeddingProvider,
    p: int,
    seed: int,
) -> SelectionResult:
    """Random or RAG selection of unlabeled samples for pseudo-labeling."""
    if strategy not in (STRATEGY_RANDOM, STRATEGY_RAG):
        raise ConfigError(f"baseline selection supports random/rag, got {strategy!r}")
    ids = [s.id for s in dataset.unlabeled]
    if p > len(ids):
        logger.warning("pseudo budget %d exceeds unlabeled pool (%d); clamping", p, len(ids))
        p = len(ids)
    if strategy == STRATEGY_RANDOM:
        chosen = random.Random(seed).sample(ids, p)
        return SelectionResult(chosen, {}, False)
    if not dataset.test:
        raise ConfigError("rag selection needs test queries to relate to")
    unlabeled_vecs = np.stack(provider.embed_texts([s.text for s in dataset.unlabeled]))
    test_vecs = np.stack(provider.embed_texts([s.text for s in dataset.test]))
    scores = unlabeled_vecs @ test_vecs.mean(axis=0)
    ranked = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return SelectionResult([ids[i] for i in ranked[:p]], {}, False)


@dataclass
class TrainingSelection:
    graph: RelevanceGraph | None
    records: list[InfluenceRecord] | None
    selection: SelectionResult


def training_graph(dataset: Dataset, provider: EmbeddingProvider, k: int) -> RelevanceGraph:
    """Top-k relevance graph over the labeled and unlabeled samples."""
    samples = list(dataset.labeled) + list(dataset.unlabeled)
    table = provider.table_for(samples)
    return build_knn_graph(table, [s.id for s in samples], k)


def score_training_graph(graph: RelevanceGraph, dataset: Dataset) -> list[InfluenceRecord]:
    index = {sample_id: i for i, sample_id in enumerate(graph.node_ids)}
    labeled_idx = [index[s.id] for s in dataset.labeled]
    unlabeled_idx = [index[s.id] for s in dataset.unlabeled]
    return score_unlabeled(graph, labeled_idx, unlabeled_idx)


def labeled_relevance(dataset: Dataset, provider: EmbeddingProvider) -> dict[str, float]:
    """Max relevance of each unlabeled sample to any labeled one (the
    ranking used when influence is undefined)."""
    if not dataset.unlabeled:
        return {}
    labeled_vecs = np.stack(provider.embed_texts([s.text for s in dataset.labeled]))
    unlabeled_vecs = np.stack(provider.embed_texts([s.text for s in dataset.unlabeled]))
    best = (unlabeled_vecs @ labeled_vecs.T).max(axis=1)
    return {s.id: float(v) for s, v in zip(dataset.unlabeled, best)}


def select_for_pseudo_labeling(
    config: RunConfig, dataset: Dataset, provider: EmbeddingProvider
) -> TrainingSelection:
    p = config.pseudo_budget
    if p == 0:
        return TrainingSelection(None, None, SelectionResult([], {}, False))
    if config.strategy in (STRATEGY_RANDOM, STRATEGY_RAG, STRATEGY_RAG_ADAPT):
        base = STRATEGY_RAG if config.strategy == STRATEGY_RAG_ADAPT else config.strategy
        return TrainingSelection(None, None, run_baseline_selection(base, dataset, provider, p, config.seed))
    if p > len(dataset.unlabeled):
        logger.warning(
            "pseudo budget %d exceeds unlabeled pool (%d); clamping", p, len(dataset.unlabeled)
        )
    graph = training_graph(dataset, provider, config.k)
    records = score_training_graph(graph, dataset)
    selection = select_top_p(records, p, labeled_relevance(dataset, provider))
    return TrainingSelection(graph, records, selection)


# ---------------------------------------------------------------------------
# Stage 2: pseudo-label the selection and assemble the pool.


def build_pool(
    config: RunConfig,
    dataset: Dataset,
    selection: SelectionResult,
    labeler: LLMClient,
) -> CandidatePool:
    by_id = {s.id: s for s in dataset.unlabeled}
    missing = [i for i in selection.chosen if i not in by_id]
    if missing:
        raise ConfigError(f"selection references unknown unlabeled ids: {', '.join(missing)}")
    chosen = [by_id[i] for i in selection.chosen]
    template = default_template(config.task, config.classes)
    context = list(dataset.labeled) if config.pseudo_label_with_context else []
    batch = pseudo_label(
        labeler,
        chosen,
        lambda s: render_prompt(template, context, s.text),
        retry=RetryPolicy(jitter_seed=config.seed),
        strict=config.strict_labeling,
        max_in_flight=config.labeler.max_in_flight,
    )
    for sample_id, message in batch.failures:
        logger.warning("pseudo-labeling failed for %s: %s", sample_id, message)
    return assemble_pool(list(dataset.labeled), batch.results)


# ---------------------------------------------------------------------------
# Stage 3: per-query demonstration selection, prompting, and inference.


@dataclass
class QueryRecord:
    query_id: str
    demo_ids: list[str]
    prompt_sha256: str
    response: str
    prediction: str | None
    gold: str | None
    latency_s: float
    prompt: str = ""  # kept for the prompts artifact, not part of results rows


@dataclass
class RunResult:
    records: list[QueryRecord]
    metrics: list[Metric]
    config: RunConfig


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def extract_prediction(task: str, response: str) -> str | None:
    if task == TASK_MULTIPLE_CHOICE:
        return extract_choice(response)
    return response.strip()


def compute_metrics(task: str, records: Sequence[QueryRecord]) -> list[Metric]:
    scored = [(r.prediction, r.gold) for r in records if r.gold is not None]
    if not scored:
        return []
    if task == TASK_SUMMARIZATION:
        values = [rouge_l(pred or "", gold) for pred, gold in scored]
        return [Metric("rouge_l", sum(values) / len(values), len(values))]
    preds = [pred for pred, _ in scored]
    if task == TASK_MULTIPLE_CHOICE:
        golds = [extract_choice(gold) or gold for _, gold in scored]
    else:
        golds = [gold for _, gold in scored]
    return [accuracy(preds, golds)]


def _rag_adapt_selection(
    pool: CandidatePool, query_vec: np.ndarray, pool_vecs: np.ndarray, alpha: float
) -> SelectionResult:
    ids = pool.ids()
    scores = pool_vecs @ query_vec
    ranked = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    m = adaptive_count(len(ids), alpha)
    return SelectionResult([ids[i] for i in ranked[:m]], {}, False)


def run_inference(
    config: RunConfig,
    dataset: Dataset,
    pool: CandidatePool,
    provider: EmbeddingProvider,
    inference: LLMClient,
) -> RunResult:
    """Answer every test query, one record per query in test-set order."""
    if config.strategy != STRATEGY_ZERO_SHOT and not pool.entries:
        raise ConfigError("candidate pool is empty; nothing to demonstrate with")
    template = default_template(config.task, config.classes)
    retry = RetryPolicy(jitter_seed=config.seed)
    shared = SelectionResult(pool.ids(), {}, False)
    pool_query_vecs: np.ndarray | None = None
    if config.strategy == STRATEGY_RAG_ADAPT:
        pool_query_vecs = np.stack(provider.embed_texts([e.text for e in pool.entries]))

    def select_demos(query: Sample) -> SelectionResult:
        if config.strategy == STRATEGY_ZERO_SHOT:
            return SelectionResult([], {}, False)
        if config.strategy == STRATEGY_MAPLE and config.mode == MODE_ADAPTIVE:
            return select_adaptive(pool, query, provider, config.k, config.alpha)
        if config.strategy == STRATEGY_RAG_ADAPT:
            assert pool_query_vecs is not None
            query_vec = provider.embed_texts([query.text])[0]
            return _rag_adapt_selection(pool, query_vec, pool_query_vecs, config.alpha)
        return shared

    def answer(query: Sample) -> QueryRecord:
        selection = select_demos(query)
        demos = order_demos(selection, pool, config.order)
        prompt = render_prompt(template, demos, query.text)
        start = time.perf_counter()
        response, _ = with_retries(
            lambda: inference.generate(prompt, query_text=query.text), retry
        )
        latency = 0.0 if inference.deterministic else time.perf_counter() - start
        return QueryRecord(
            query_id=query.id,
            demo_ids=[d.id for d in demos],
            prompt_sha256=prompt_hash(prompt),
            response=response,
            prediction=extract_prediction(config.task, response),
            gold=query.label,
            latency_s=latency,
            prompt=prompt,
        )

    queries = list(dataset.test)
    if config.concurrency > 1 and len(queries) > 1:
        with ThreadPoolExecutor(max_workers=config.concurrency) as executor:
            records = list(executor.map(answer, queries))
    else:
        records = [answer(q) for q in queries]
    return RunResult(records, compute_metrics(config.task, records), config)


def run_pipeline(
    config: RunConfig,
    dataset: Dataset,
    provider: EmbeddingProvider | None = None,
    labeler_client: LLMClient | None = None,
    inference_client: LLMClient | None = None,
) -> RunResult:
    """The whole flow in memory: select, pseudo-label, pool, infer."""
    provider = provider or make_provider(config, dataset)
    labeler_client = labeler_client or make_client(config.labeler, dataset, provider)
    inference_client = inference_client or make_client(config.inference, dataset, provider)
    training = select_for_pseudo_labeling(config, dataset, provider)
    pool = build_pool(config, dataset, training.selection, labeler_client)
    return run_inference(config, dataset, pool, provider, inference_client)


# ---------------------------------------------------------------------------
# Artifact (de)serialization shared with the CLI stages.


def records_to_rows(records: Sequence[QueryRecord]) -> list[dict]:
    return [
        {
            "query_id": r.query_id,
            "demo_ids": r.demo_ids,
            "prompt_sha256": r.prompt_sha256,
            "response": r.response,
            "prediction": r.prediction,
            "gold": r.gold,
            "latency_s": r.latency_s,
        }
        for r in records
    ]


def rows_to_records(rows: Sequence[Mapping]) -> list[QueryRecord]:
    return [
        QueryRecord(
            query_id=row["query_id"],
            demo_ids=list(row["demo_ids"]),
            prompt_sha256=row["prompt_sha256"],
            response=row["response"],
            prediction=row["prediction"],
            gold=row["gold"],
            latency_s=float(row["latency_s"]),
        )
        for row in rows
    ]


def score_rows(records: Sequence[InfluenceRecord]) -> list[dict]:
    """JSONL view of influence records; NEG_INFINITY serializes to null."""
    return [
        {
            "id": r.sample_id,
            "score": None if r.score == NEG_INFINITY else r.score,
            "mean_dist": r.mean_dist,
            "log_geo_paths": r.log_geo_paths,
        }
        for r in records
    ]


def rows_to_score_records(rows: Sequence[Mapping]) -> list[InfluenceRecord]:
    records = []
    for row in rows:
        score = NEG_INFINITY if row["score"] is None else float(row["score"])
        records.append(
            InfluenceRecord(
                node=-1,
                sample_id=row["id"],
                score=score,
                mean_dist=row.get("mean_dist"),
                log_geo_paths=row.get("log_geo_paths"),
                reachable_targets=0 if score == NEG_INFINITY else -1,
            )
        )
    return records
