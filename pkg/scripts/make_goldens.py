#!/usr/bin/env python3
"""Regenerate the golden files under fixtures/goldens/.

Goldens pin behavior byte-for-byte: the rendered prompts for every task
kind at 0 and 3 demonstrations, the zero-shot prompt hashes for the toy QA
test split, and one full pipeline run on the toy QA corpus. Regenerate only
when a deliberate behavior change is being made, and re-audit the output.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from maple.dataset import Sample, load_dataset  # noqa: E402
from maple.jsonl import write_json_atomic, write_jsonl_atomic, write_text_atomic  # noqa: E402
from maple.prompting import default_template, render_prompt  # noqa: E402
from maple.runner import config_from_dict, prompt_hash, records_to_rows, run_pipeline  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
GOLDENS = ROOT / "fixtures" / "goldens"

SUMMARIZATION_DEMOS = [
    Sample("gold-s1",
           "Torrential rain flooded the riverside district on Friday, forcing dozens "
           "of families to evacuate and closing the main bridge for repairs.",
           "Flooding forced evacuations and closed the main bridge."),
    Sample("gold-s2",
           "The city council approved a new tram line on Tuesday after years of "
           "debate, with construction expected to begin next spring.",
           "The council approved a tram line starting construction next spring."),
    Sample("gold-s3",
           "Researchers announced a battery design that charges in under ten minutes, "
           "though mass production remains several years away.",
           "A fast-charging battery design was announced but is years from production."),
]
SUMMARIZATION_QUERY = (
    "The village bakery celebrated its centenary on Saturday with a street fair, "
    "drawing visitors from across the county."
)

MULTIPLE_CHOICE_DEMOS = [
    Sample("gold-q1", "What is 2 plus 3? Options: (A) 4; (B) 5; (C) 6; (D) 7", "(B)"),
    Sample("gold-q2", "What color is fresh grass? Options: (A) purple; (B) green; (C) orange; (D) black", "(B)"),
    Sample("gold-q3", "Which animal barks? Options: (A) dog; (B) cat; (C) cow; (D) duck", "(A)"),
]
MULTIPLE_CHOICE_QUERY = "What is the capital of France? Options: (A) Paris; (B) Rome; (C) Berlin; (D) Madrid"

CLASSIFICATION_DEMOS = [
    Sample("gold-c1", "the film was wonderful and the acting was superb", "positive"),
    Sample("gold-c2", "the film was terrible and the acting felt wooden", "negative"),
    Sample("gold-c3", "the film was okay and the acting was serviceable", "neutral"),
]
CLASSIFICATION_QUERY = "a delightful story with brilliant performances throughout"
CLASSIFICATION_CLASSES = ("negative", "neutral", "positive")


def make_prompt_goldens() -> None:
    cases = {
        "summarization": (default_template("summarization"), SUMMARIZATION_DEMOS, SUMMARIZATION_QUERY),
        "multiple_choice": (default_template("multiple_choice"), MULTIPLE_CHOICE_DEMOS, MULTIPLE_CHOICE_QUERY),
        "classification": (
            default_template("classification", CLASSIFICATION_CLASSES),
            CLASSIFICATION_DEMOS,
            CLASSIFICATION_QUERY,
        ),
    }
    for name, (template, demos, query) in cases.items():
        for shots in (0, 3):
            path = GOLDENS / f"prompt_{name}_{shots}shot.txt"
            write_text_atomic(path, render_prompt(template, demos[:shots], query))
            print(f"wrote {path.relative_to(ROOT)}")


def make_zero_shot_hashes() -> None:
    template = default_template("multiple_choice")
    test = load_dataset(
        ROOT / "fixtures/toy_qa/labeled.jsonl",
        None,
        ROOT / "fixtures/toy_qa/test.jsonl",
    ).test
    hashes = {s.id: prompt_hash(render_prompt(template, [], s.text)) for s in test}
    path = GOLDENS / "toy_qa_zero_shot_hashes.json"
    write_json_atomic(path, hashes)
    print(f"wrote {path.relative_to(ROOT)}")


def make_golden_run() -> None:
    config = config_from_dict(json.loads((ROOT / "fixtures/configs/toy_qa_maple.json").read_text()))
    dataset = load_dataset(
        ROOT / config.data.labeled, ROOT / config.data.unlabeled, ROOT / config.data.test
    )
    result = run_pipeline(config, dataset)
    rows = records_to_rows(result.records)
    write_jsonl_atomic(GOLDENS / "toy_qa_maple_results.jsonl", rows)
    metric = result.metrics[0]
    write_json_atomic(
        GOLDENS / "toy_qa_maple_metrics.json",
        {"name": metric.name, "value": metric.value, "n": metric.n},
    )
    print(f"wrote golden run: {len(rows)} records, {metric.name}={metric.value:.4f}")


def main() -> None:
    GOLDENS.mkdir(parents=True, exist_ok=True)
    make_prompt_goldens()
    make_zero_shot_hashes()
    make_golden_run()


if __name__ == "__main__":
    main()
