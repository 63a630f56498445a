#!/usr/bin/env python3
"""Fixed-size pool, varying labeled/pseudo-labeled fraction.

Holds the demonstration pool at --total entries and sweeps how many of them
are human-labeled: the remainder of the budget is pseudo-labeled. Labeled
samples are drawn (seeded) from the full labeled corpus; the rest of the
corpus becomes the unlabeled split.

    python3 scripts/run_fraction_experiment.py \
        --corpus fixtures/toy_qa --config fixtures/configs/toy_qa_maple.json \
        --total 12 --labeled-counts 4,6,8
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from maple.cli import METRICS_FILE, dispatch  # noqa: E402
from maple.dataset import load_samples, save_samples  # noqa: E402
from maple.jsonl import write_json_atomic  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", required=True)
    parser.add_argument("--corpus", required=True,
                        help="directory with labeled.jsonl / unlabeled.jsonl / test.jsonl")
    parser.add_argument("--total", type=int, default=12, help="fixed pool size")
    parser.add_argument("--labeled-counts", default="4,6,8")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="out/fraction_experiment")
    args = parser.parse_args()

    corpus = Path(args.corpus)
    # everything with a label is eligible to play the human-labeled role
    eligible = load_samples(corpus / "labeled.jsonl", "labeled")
    spare = load_samples(corpus / "unlabeled.jsonl", "unlabeled")
    counts = [int(x) for x in args.labeled_counts.split(",") if x.strip()]
    out_root = Path(args.out)

    results: dict[int, float] = {}
    for n_labeled in counts:
        pseudo_budget = args.total - n_labeled
        if n_labeled < 1 or n_labeled > len(eligible) or pseudo_budget < 0:
            print(f"skipping n_labeled={n_labeled}: infeasible with {len(eligible)} "
                  f"labeled samples and total {args.total}", file=sys.stderr)
            continue
        rng = random.Random(args.seed)
        labeled = rng.sample(eligible, n_labeled)
        chosen_ids = {s.id for s in labeled}
        # demoted labeled samples join the unlabeled pool (labels stripped on load)
        demoted = [s for s in eligible if s.id not in chosen_ids]

        run_dir = out_root / f"L{n_labeled}"
        run_dir.mkdir(parents=True, exist_ok=True)
        save_samples(run_dir / "labeled.jsonl", labeled)
        save_samples(run_dir / "unlabeled.jsonl", demoted + spare)
        code = dispatch([
            "pipeline", "--config", args.config,
            "--labeled", str(run_dir / "labeled.jsonl"),
            "--unlabeled", str(run_dir / "unlabeled.jsonl"),
            "--test", str(corpus / "test.jsonl"),
            "--pseudo-budget", str(pseudo_budget),
            "--out", str(run_dir),
        ])
        if code != 0:
            return code
        metric = json.loads((run_dir / METRICS_FILE).read_text())
        results[n_labeled] = metric["value"]
        print(f"labeled={n_labeled:<4} pseudo={pseudo_budget:<4} {metric['name']}={metric['value']:.4f}")

    write_json_atomic(out_root / "summary.json", results)
    print(f"summary written to {out_root / 'summary.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
