"""Influence-based pseudo-label selection and adaptive demonstration
selection for many-shot in-context learning."""

from .dataset import Dataset, Sample, assemble_dataset, load_dataset, load_samples, save_samples
from .embedding import (
    EmbeddingTable,
    FileProvider,
    HashedProvider,
    RemoteProvider,
    embed_hashed,
    embed_pair,
    load_embeddings,
    save_embeddings,
)
from .graph import (
    UNREACHABLE,
    PathStats,
    RelevanceGraph,
    bfs_paths,
    build_graph_from_relevance,
    build_knn_graph,
    mean_degree,
    oracle_paths,
)
from .influence import (
    NEG_INFINITY,
    InfluenceRecord,
    SelectionResult,
    adaptive_count,
    influence_score,
    score_unlabeled,
    select_adaptive,
    select_top_p,
)
from .labeling import (
    CandidatePool,
    FixedResponseClient,
    NearestLabelClient,
    RemoteLLMClient,
    RetryPolicy,
    assemble_pool,
    pseudo_label,
)
from .metrics import Metric, accuracy, extract_choice, lcs_length, rouge_l
from .prompting import OrderPolicy, TaskTemplate, default_template, order_demos, render_prompt
from .runner import (
    RunConfig,
    RunResult,
    config_from_dict,
    run_baseline_selection,
    run_pipeline,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
