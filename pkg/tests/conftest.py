import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from pianoviewer import datagen


@pytest.fixture(scope="session")
def dataset_root(tmp_path_factory) -> Path:
    """A 14-session synthetic dataset shared by catalog/server tests."""
    root = tmp_path_factory.mktemp("dataset")
    datagen.make_dataset(root, n_sessions=14, seed=91, n_unaligned=2, n_incomplete=2)
    return root


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
