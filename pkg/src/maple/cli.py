"""Command-line entry point.

Each verb reads the JSON run config (plus optional flag overrides), executes
one pipeline stage against the artifacts in the output directory, prints a
one-line summary, and exits nonzero with a stage tag on failure. ``pipeline``
chains the stages through the same artifact files, so running the verbs
individually produces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .dataset import Dataset, load_dataset
from .embedding import EmbeddingProvider
from .graph import graph_from_json, graph_to_json
from .influence import SelectionResult, select_top_p
from .jsonl import read_jsonl, write_json_atomic, write_jsonl_atomic
from .labeling import load_pool, save_pool
from .runner import (
    STRATEGY_MAPLE,
    STRATEGY_RAG,
    STRATEGY_RAG_ADAPT,
    STRATEGY_RANDOM,
    RunConfig,
    build_pool,
    config_from_dict,
    labeled_relevance,
    make_client,
    make_provider,
    records_to_rows,
    rows_to_records,
    rows_to_score_records,
    run_baseline_selection,
    run_inference,
    score_rows,
    score_training_graph,
    training_graph,
    compute_metrics,
)

GRAPH_FILE = "graph.json"
SCORES_FILE = "scores.jsonl"
SELECTION_FILE = "selection.json"
POOL_FILE = "pool.jsonl"
PROMPTS_FILE = "prompts.jsonl"
RESULTS_FILE = "results.jsonl"
METRICS_FILE = "metrics.json"


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")


def _require(stage: str, path: Path, hint: str) -> Path:
    if not path.exists():
        raise StageError(stage, f"missing artifact: {path} (run `maple {hint}` first)")
    return path


def stage_build_graph(
    config: RunConfig, dataset: Dataset, provider: EmbeddingProvider, out: Path,
    dump_copy: str | None = None,
) -> str:
    graph = training_graph(dataset, provider, config.k)
    payload = graph_to_json(graph)
    write_json_atomic(out / GRAPH_FILE, payload)
    if dump_copy:
        write_json_atomic(dump_copy, payload)
    return (
        f"build-graph: {graph.n} nodes, {len(graph.weights)} edges, "
        f"mean degree {graph.mean_degree:.4f}"
    )


def stage_score(config: RunConfig, dataset: Dataset, out: Path, dump_copy: str | None = None) -> str:
    path = _require("score", out / GRAPH_FILE, "build-graph")
    graph = graph_from_json(json.loads(path.read_text()))
    try:
        records = score_training_graph(graph, dataset)
    except KeyError as exc:
        raise StageError("score", f"graph does not cover sample id {exc}") from exc
    rows = score_rows(records)
    write_jsonl_atomic(out / SCORES_FILE, rows)
    if dump_copy:
        write_jsonl_atomic(dump_copy, rows)
    return f"score: {len(records)} unlabeled candidates scored against {len(dataset.labeled)} labeled"


def stage_select(config: RunConfig, dataset: Dataset, provider: EmbeddingProvider, out: Path) -> str:
    p = config.pseudo_budget
    if p == 0:
        selection = SelectionResult([], {}, False)
    elif config.strategy in (STRATEGY_RANDOM, STRATEGY_RAG, STRATEGY_RAG_ADAPT):
        base = STRATEGY_RAG if config.strategy == STRATEGY_RAG_ADAPT else config.strategy
        selection = run_baseline_selection(base, dataset, provider, p, config.seed)
    else:
        path = _require("select", out / SCORES_FILE, "score")
        records = rows_to_score_records([row for _, row in read_jsonl(path)])
        selection = select_top_p(records, p, labeled_relevance(dataset, provider))
    write_json_atomic(
        out / SELECTION_FILE,
        {
            "strategy": config.strategy,
            "pseudo_budget": p,
            "chosen": selection.chosen,
            "fallback_used": selection.fallback_used,
        },
    )
    note = " (fallback used)" if selection.fallback_used else ""
    return f"select: {len(selection.chosen)} of {len(dataset.unlabeled)} unlabeled chosen{note}"


def stage_pseudo_label(
    config: RunConfig, dataset: Dataset, provider: EmbeddingProvider, out: Path
) -> str:
    path = _require("pseudo-label", out / SELECTION_FILE, "select")
    payload = json.loads(path.read_text())
    selection = SelectionResult(list(payload["chosen"]), {}, bool(payload["fallback_used"]))
    labeler = make_client(config.labeler, dataset, provider)
    pool = build_pool(config, dataset, selection, labeler)
    save_pool(out / POOL_FILE, pool)
    pseudo = sum(1 for e in pool.entries if e.id in pool.transcripts)
    return f"pseudo-label: pool of {len(pool.entries)} ({len(pool.entries) - pseudo} human + {pseudo} pseudo)"


def stage_run(config: RunConfig, dataset: Dataset, provider: EmbeddingProvider, out: Path) -> str:
    path = _require("run", out / POOL_FILE, "pseudo-label")
    pool = load_pool(path)
    if not dataset.test:
        raise StageError("run", "no test queries; pass --test or set data.test in the config")
    inference = make_client(config.inference, dataset, provider)
    result = run_inference(config, dataset, pool, provider, inference)
    write_jsonl_atomic(out / RESULTS_FILE, records_to_rows(result.records))
    write_jsonl_atomic(
        out / PROMPTS_FILE,
        [
            {"query_id": r.query_id, "prompt_sha256": r.prompt_sha256, "prompt": r.prompt}
            for r in result.records
        ],
    )
    summary = f"run: {len(result.records)} queries answered"
    if result.metrics:
        metric = result.metrics[0]
        write_json_atomic(out / METRICS_FILE, {"name": metric.name, "value": metric.value, "n": metric.n})
        summary += f", {metric.name}={metric.value:.4f} (n={metric.n})"
    return summary


def stage_evaluate(config: RunConfig, dataset: Dataset, out: Path) -> str:
    path = _require("evaluate", out / RESULTS_FILE, "run")
    records = rows_to_records([row for _, row in read_jsonl(path)])
    metrics = compute_metrics(config.task, records)
    if not metrics:
        raise StageError("evaluate", "no gold labels in the results; nothing to score")
    metric = metrics[0]
    write_json_atomic(out / METRICS_FILE, {"name": metric.name, "value": metric.value, "n": metric.n})
    return f"evaluate: {metric.name}={metric.value:.4f} (n={metric.n})"


def pipeline_stages(config: RunConfig) -> list[str]:
    """The verb sequence `pipeline` executes for this config."""
    stages = []
    if config.strategy == STRATEGY_MAPLE and config.pseudo_budget >= 1:
        stages += ["build-graph", "score"]
    return stages + ["select", "pseudo-label", "run"]


def run_pipeline_verb(
    config: RunConfig,
    dataset: Dataset,
    provider: EmbeddingProvider,
    out: Path,
    dump_graph: str | None = None,
    dump_scores: str | None = None,
) -> list[str]:
    summaries = []
    for stage in pipeline_stages(config):
        if stage == "build-graph":
            summaries.append(_guard(stage, stage_build_graph, config, dataset, provider, out, dump_graph))
        elif stage == "score":
            summaries.append(_guard(stage, stage_score, config, dataset, out, dump_scores))
        elif stage == "select":
            summaries.append(_guard(stage, stage_select, config, dataset, provider, out))
        elif stage == "pseudo-label":
            summaries.append(_guard(stage, stage_pseudo_label, config, dataset, provider, out))
        elif stage == "run":
            summaries.append(_guard(stage, stage_run, config, dataset, provider, out))
    return summaries


def _guard(stage: str, fn, *args) -> str:
    try:
        return fn(*args)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, str(exc)) from exc


# ---------------------------------------------------------------------------
# Argument parsing.


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maple",
        description="Influence-based pseudo-label selection and adaptive many-shot prompting.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    verbs = {
        "build-graph": "build the top-k relevance graph over labeled+unlabeled samples",
        "score": "influence-score the unlabeled samples against the labeled set",
        "select": "choose which unlabeled samples to pseudo-label",
        "pseudo-label": "label the selection with the configured LLM client",
        "run": "select demonstrations per query, prompt the LLM, write results",
        "evaluate": "recompute metrics from results.jsonl",
        "pipeline": "run every stage in sequence",
        "sweep": "run the pipeline once per pseudo-label budget",
    }
    for verb, help_text in verbs.items():
        sp = sub.add_parser(verb, help=help_text)
        sp.add_argument("--config", required=True, help="JSON run config")
        sp.add_argument("--labeled", help="labeled split JSONL (overrides config)")
        sp.add_argument("--unlabeled", help="unlabeled split JSONL (overrides config)")
        sp.add_argument("--test", help="test split JSONL (overrides config)")
        sp.add_argument("--out", help="output directory (overrides config)")
        sp.add_argument("--strategy", choices=["maple", "random", "rag", "rag_adapt", "few_shot", "zero_shot"])
        sp.add_argument("--mode", choices=["adaptive", "fixed"])
        sp.add_argument("--task", choices=["summarization", "multiple_choice", "classification"])
        sp.add_argument("--order", choices=["labeled_first", "pseudo_first"])
        sp.add_argument("--k", type=int)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--pseudo-budget", type=int, dest="pseudo_budget")
        sp.add_argument("--seed", type=int, help="embedding seed (hashed provider)")
        sp.add_argument("--run-seed", type=int, dest="run_seed", help="pipeline seed")
        sp.add_argument("--embedder", choices=["hashed", "file", "remote"])
        sp.add_argument("--dim", type=int, help="hashed embedding dimension")
        sp.add_argument("--embeddings", help="precomputed vectors JSONL (file embedder)")
        sp.add_argument("--llm", choices=["mock_fixed", "mock_nearest", "remote"],
                        help="sets both the labeler and inference client kind")
        sp.add_argument("--concurrency", type=int)
        if verb in ("build-graph", "pipeline"):
            sp.add_argument("--dump-graph", metavar="PATH", help="extra copy of the graph JSON")
        if verb in ("score", "pipeline"):
            sp.add_argument("--dump-scores", metavar="PATH", help="extra copy of the score JSONL")
        if verb == "sweep":
            sp.add_argument("--pseudo-budgets", required=True,
                            help="comma-separated budgets, e.g. 20,40,60")
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    try:
        payload = json.loads(Path(args.config).read_text())
    except FileNotFoundError:
        raise StageError("config", f"config file not found: {args.config}")
    except json.JSONDecodeError as exc:
        raise StageError("config", f"invalid JSON in {args.config}: {exc}")

    for key in ("strategy", "mode", "task", "k", "alpha", "pseudo_budget", "concurrency"):
        value = getattr(args, key, None)
        if value is not None:
            payload[key] = value
    if getattr(args, "run_seed", None) is not None:
        payload["seed"] = args.run_seed
    if args.order:
        payload.setdefault("order", {})["group_order"] = args.order
    data = payload.setdefault("data", {})
    for key in ("labeled", "unlabeled", "test"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    embedder = payload.setdefault("embedder", {})
    if args.embedder:
        embedder["kind"] = args.embedder
    if args.dim is not None:
        embedder["dim"] = args.dim
    if args.seed is not None:
        embedder["seed"] = args.seed
    if args.embeddings:
        embedder["path"] = args.embeddings
    if args.llm:
        payload.setdefault("labeler", {})["kind"] = args.llm
        payload.setdefault("inference", {})["kind"] = args.llm
    if args.out:
        payload["out_dir"] = args.out
    try:
        return config_from_dict(payload)
    except (TypeError, ValueError) as exc:
        raise StageError("config", str(exc))


def _load_inputs(config: RunConfig) -> tuple[Dataset, EmbeddingProvider, Path]:
    if not config.data.labeled:
        raise StageError("dataset", "no labeled split; pass --labeled or set data.labeled")
    if not config.out_dir:
        raise StageError("config", "no output directory; pass --out or set out_dir")
    try:
        dataset = load_dataset(config.data.labeled, config.data.unlabeled, config.data.test)
    except Exception as exc:
        raise StageError("dataset", str(exc))
    try:
        provider = make_provider(config, dataset)
    except Exception as exc:
        raise StageError("embedding", str(exc))
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return dataset, provider, out


def dispatch(argv: list[str]) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    try:
        config = _load_config(args)
        dataset, provider, out = _load_inputs(config)
        if args.verb == "build-graph":
            print(_guard("build-graph", stage_build_graph, config, dataset, provider, out,
                         getattr(args, "dump_graph", None)))
        elif args.verb == "score":
            print(_guard("score", stage_score, config, dataset, out, getattr(args, "dump_scores", None)))
        elif args.verb == "select":
            print(_guard("select", stage_select, config, dataset, provider, out))
        elif args.verb == "pseudo-label":
            print(_guard("pseudo-label", stage_pseudo_label, config, dataset, provider, out))
        elif args.verb == "run":
            print(_guard("run", stage_run, config, dataset, provider, out))
        elif args.verb == "evaluate":
            print(_guard("evaluate", stage_evaluate, config, dataset, out))
        elif args.verb == "pipeline":
            for line in run_pipeline_verb(config, dataset, provider, out,
                                          getattr(args, "dump_graph", None),
                                          getattr(args, "dump_scores", None)):
                print(line)
        elif args.verb == "sweep":
            try:
                budgets = [int(x) for x in args.pseudo_budgets.split(",") if x.strip()]
            except ValueError:
                raise StageError("sweep", f"bad --pseudo-budgets value: {args.pseudo_budgets!r}")
            if not budgets:
                raise StageError("sweep", "no budgets given")
            for budget in budgets:
                sub_config = replace(config, pseudo_budget=budget, out_dir=str(out / f"P{budget}"))
                sub_out = Path(sub_config.out_dir)
                sub_out.mkdir(parents=True, exist_ok=True)
                print(f"--- pseudo_budget={budget} -> {sub_out}")
                for line in run_pipeline_verb(sub_config, dataset, provider, sub_out):
                    print(line)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.message}", file=sys.stderr)
        return 1
    return 0


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
