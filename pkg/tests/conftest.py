"""Shared fixtures: the bundled big-cats pack and tmp copies to corrupt."""

import shutil
from pathlib import Path

import pytest

from zoooz.content import load_pack

REPO_ROOT = Path(__file__).resolve().parents[1]
PACK_DIR = REPO_ROOT / "packs" / "big-cats"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def pack_dir() -> Path:
    return PACK_DIR


@pytest.fixture(scope="session")
def pack():
    return load_pack(PACK_DIR)


@pytest.fixture()
def pack_copy(tmp_path) -> Path:
    """A throwaway copy of the fixture pack for corruption tests."""
    target = tmp_path / "pack"
    shutil.copytree(PACK_DIR, target)
    return target


@pytest.fixture(scope="session")
def walk_file() -> Path:
    return PACK_DIR / "walks" / "grand-tour.jsonl"


@pytest.fixture(scope="session")
def golden_tour_file() -> Path:
    return GOLDEN_DIR / "big_cats_tour.jsonl"
