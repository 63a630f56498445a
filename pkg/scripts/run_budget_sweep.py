#!/usr/bin/env python3
"""Sweep selection strategies over pseudo-label budgets and tabulate metrics.

Mirrors the budget-vs-quality experiment: for each strategy and each budget P,
run the full pipeline and report the aggregate metric.

    python3 scripts/run_budget_sweep.py --config fixtures/configs/toy_qa_maple.json \
        --budgets 2,4,8 --strategies maple,random,rag
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from maple.cli import METRICS_FILE, dispatch  # noqa: E402
from maple.jsonl import write_json_atomic  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", required=True)
    parser.add_argument("--budgets", default="2,4,8", help="comma-separated pseudo-label budgets")
    parser.add_argument("--strategies", default="maple,random,rag",
                        help="comma-separated strategies to compare")
    parser.add_argument("--out", default="out/budget_sweep")
    args = parser.parse_args()

    budgets = [int(x) for x in args.budgets.split(",") if x.strip()]
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    out_root = Path(args.out)

    table: dict[str, dict[int, float]] = {}
    for strategy in strategies:
        table[strategy] = {}
        for budget in budgets:
            run_dir = out_root / strategy / f"P{budget}"
            code = dispatch([
                "pipeline", "--config", args.config,
                "--strategy", strategy,
                "--pseudo-budget", str(budget),
                "--out", str(run_dir),
            ])
            if code != 0:
                print(f"run failed: strategy={strategy} budget={budget}", file=sys.stderr)
                return code
            metric = json.loads((run_dir / METRICS_FILE).read_text())
            table[strategy][budget] = metric["value"]

    header = "strategy".ljust(12) + "".join(f"P={b:<8}" for b in budgets)
    print("\n" + header)
    print("-" * len(header))
    for strategy, row in table.items():
        print(strategy.ljust(12) + "".join(f"{row[b]:<10.4f}" for b in budgets))
    write_json_atomic(out_root / "summary.json", table)
    print(f"\nsummary written to {out_root / 'summary.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
