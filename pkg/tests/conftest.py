import importlib.util
import json
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
GOLDENS = FIXTURES / "goldens"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def goldens_dir() -> Path:
    return GOLDENS


@pytest.fixture(scope="session")
def golden_inputs():
    """The demo sets and queries the committed prompt goldens were built from."""
    spec = importlib.util.spec_from_file_location(
        "make_goldens", ROOT / "scripts" / "make_goldens.py"
    )
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="session")
def toy_qa_dataset():
    from maple.dataset import load_dataset

    return load_dataset(
        FIXTURES / "toy_qa/labeled.jsonl",
        FIXTURES / "toy_qa/unlabeled.jsonl",
        FIXTURES / "toy_qa/test.jsonl",
    )


@pytest.fixture(scope="session")
def toy_sentiment_dataset():
    from maple.dataset import load_dataset

    return load_dataset(
        FIXTURES / "toy_sentiment/labeled.jsonl",
        FIXTURES / "toy_sentiment/unlabeled.jsonl",
        FIXTURES / "toy_sentiment/test.jsonl",
    )


def toy_qa_config_dict(out_dir: Path, **overrides) -> dict:
    payload = json.loads((FIXTURES / "configs/toy_qa_maple.json").read_text())
    for key in ("labeled", "unlabeled", "test"):
        payload["data"][key] = str(FIXTURES / "toy_qa" / f"{key}.jsonl")
    payload["out_dir"] = str(out_dir)
    payload.update(overrides)
    return payload


@pytest.fixture
def toy_qa_config_file(tmp_path):
    """Write a toy QA config (absolute paths) into tmp and return its path."""

    def write(out_name: str = "out", **overrides) -> Path:
        payload = toy_qa_config_dict(tmp_path / out_name, **overrides)
        path = tmp_path / f"config_{out_name}.json"
        path.write_text(json.dumps(payload, indent=2))
        return path

    return write
