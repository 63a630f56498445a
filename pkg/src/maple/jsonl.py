"""Small JSONL and atomic-file helpers shared by the pipeline stages."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator


class JsonlError(ValueError):
    """Malformed JSONL input; carries the offending path and line number."""

    def __init__(self, path: os.PathLike | str, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


def read_jsonl(path: os.PathLike | str) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield (line_number, record) pairs; blank lines are skipped."""
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                record = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise JsonlError(path, line_no, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise JsonlError(path, line_no, "expected a JSON object")
            yield line_no, record


def dump_line(record: dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))


def write_text_atomic(path: os.PathLike | str, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_jsonl_atomic(path: os.PathLike | str, records: Iterable[dict[str, Any]]) -> None:
    write_text_atomic(path, "".join(dump_line(r) + "\n" for r in records))


def write_json_atomic(path: os.PathLike | str, payload: Any) -> None:
    write_text_atomic(path, json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
