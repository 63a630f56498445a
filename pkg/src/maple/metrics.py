"""Evaluation: option-letter extraction, exact-match accuracy, and ROUGE-L."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

_PARENTHESIZED = re.compile(r"\(([A-Z])\)")
_STANDALONE = re.compile(r"\b([A-G])\b")


@dataclass(frozen=True)
class Metric:
    name: str
    value: float
    n: int


def extract_choice(response: str) -> str | None:
    """First "(X)" capital letter in the response, else the first standalone
    A-G token, else None."""
    match = _PARENTHESIZED.search(response)
    if match:
        return match.group(1)
    match = _STANDALONE.search(response)
    if match:
        return match.group(1)
    return None


def _normalize(text: str) -> str:
    return " ".join(text.split()).lower()


def accuracy(preds: Sequence[str | None], golds: Sequence[str]) -> Metric:
    """Fraction of exact matches after trimming, lowercasing, and collapsing
    whitespace. A None prediction never matches."""
    if len(preds) != len(golds):
        raise ValueError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")
    if not preds:
        raise ValueError("nothing to score")
    hits = sum(
        1 for p, g in zip(preds, golds) if p is not None and _normalize(p) == _normalize(g)
    )
    return Metric("accuracy", hits / len(preds), len(preds))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length by dynamic programming."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for token_a in a:
        curr = [0] * (len(b) + 1)
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[len(b)]


def rouge_l(candidate: str, reference: str) -> float:
    """LCS-based F-score over lowercased whitespace tokens."""
    cand = candidate.lower().split()
    ref = reference.lower().split()
    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    recall = lcs / len(ref) if ref else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)
