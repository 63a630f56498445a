"""Loading and validation of the labeled / unlabeled / test splits.

Corpora are newline-delimited JSON with fields ``id``, ``text`` and an
optional ``label``. Unknown fields are ignored by the pipeline but carried
along so writing a split back to disk preserves them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .jsonl import dump_line, read_jsonl, write_text_atomic

SOURCE_HUMAN = "human"
SOURCE_PSEUDO = "pseudo"

SPLIT_LABELED = "labeled"
SPLIT_UNLABELED = "unlabeled"
SPLIT_TEST = "test"

_SPLITS = (SPLIT_LABELED, SPLIT_UNLABELED, SPLIT_TEST)


class DatasetError(ValueError):
    """Invalid corpus file or split combination."""


@dataclass(frozen=True)
class Sample:
    """One datum: an id, the query text, and (when known) its label."""

    id: str
    text: str
    label: str | None = None
    source: str = SOURCE_HUMAN
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Dataset:
    labeled: tuple[Sample, ...]
    unlabeled: tuple[Sample, ...]
    test: tuple[Sample, ...]

    def counts(self) -> tuple[int, int, int]:
        return (len(self.labeled), len(self.unlabeled), len(self.test))

    def all_samples(self) -> tuple[Sample, ...]:
        return self.labeled + self.unlabeled + self.test


def load_samples(path: os.PathLike | str, split_kind: str) -> list[Sample]:
    """Read one split from a JSONL file, in file order.

    ``split_kind=labeled`` requires a label on every record. For the
    unlabeled split a ``label`` field, if present, is ignored (moved to
    ``extra`` so a rewrite preserves the original file).
    """
    if split_kind not in _SPLITS:
        raise DatasetError(f"unknown split kind {split_kind!r}; expected one of {_SPLITS}")
    if not os.path.exists(path):
        raise DatasetError(f"{split_kind} file not found: {path}")

    samples: list[Sample] = []
    seen: set[str] = set()
    for line_no, record in read_jsonl(path):
        sample_id = record.get("id")
        text = record.get("text")
        if not isinstance(sample_id, str) or not sample_id:
            raise DatasetError(f"{path}:{line_no}: missing or empty 'id'")
        if not isinstance(text, str):
            raise DatasetError(f"{path}:{line_no}: missing 'text' for id {sample_id!r}")
        if sample_id in seen:
            raise DatasetError(f"{path}:{line_no}: duplicate id {sample_id!r}")
        seen.add(sample_id)

        label = record.get("label")
        if label is not None and not isinstance(label, str):
            raise DatasetError(f"{path}:{line_no}: 'label' must be a string for id {sample_id!r}")
        extra = {k: v for k, v in record.items() if k not in ("id", "text", "label")}

        if split_kind == SPLIT_LABELED:
            if label is None:
                raise DatasetError(f"{path}:{line_no}: labeled split requires a label (id {sample_id!r})")
            samples.append(Sample(sample_id, text, label, SOURCE_HUMAN, extra))
        elif split_kind == SPLIT_UNLABELED:
            if label is not None:
                extra = {**extra, "label": label}
            samples.append(Sample(sample_id, text, None, SOURCE_HUMAN, extra))
        else:
            samples.append(Sample(sample_id, text, label, SOURCE_HUMAN, extra))
    return samples


def save_samples(path: os.PathLike | str, samples: list[Sample]) -> None:
    """Write samples back out as JSONL, preserving any extra fields."""
    lines = []
    for sample in samples:
        record: dict = {"id": sample.id, "text": sample.text}
        if sample.label is not None:
            record["label"] = sample.label
        for key, value in sample.extra.items():
            record.setdefault(key, value)
        lines.append(dump_line(record))
    write_text_atomic(path, "".join(line + "\n" for line in lines))


def assemble_dataset(
    labeled: list[Sample], unlabeled: list[Sample], test: list[Sample]
) -> Dataset:
    """Combine the three splits, enforcing id disjointness."""
    if not labeled:
        raise DatasetError("labeled split is empty; at least one labeled sample is required")
    splits = {SPLIT_LABELED: labeled, SPLIT_UNLABELED: unlabeled, SPLIT_TEST: test}
    id_sets = {name: {s.id for s in split} for name, split in splits.items()}
    for a, b in ((SPLIT_LABELED, SPLIT_UNLABELED), (SPLIT_LABELED, SPLIT_TEST), (SPLIT_UNLABELED, SPLIT_TEST)):
        overlap = id_sets[a] & id_sets[b]
        if overlap:
            shown = ", ".join(sorted(overlap))
            raise DatasetError(f"ids appear in both {a} and {b} splits: {shown}")
    unlabeled_clean = [replace(s, label=None) if s.label is not None else s for s in unlabeled]
    return Dataset(tuple(labeled), tuple(unlabeled_clean), tuple(test))


def load_dataset(
    labeled_path: os.PathLike | str,
    unlabeled_path: os.PathLike | str | None,
    test_path: os.PathLike | str | None,
) -> Dataset:
    labeled = load_samples(labeled_path, SPLIT_LABELED)
    unlabeled = load_samples(unlabeled_path, SPLIT_UNLABELED) if unlabeled_path else []
    test = load_samples(test_path, SPLIT_TEST) if test_path else []
    return assemble_dataset(labeled, unlabeled, test)
