import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reportcert.embeddings import Embedder, WordVectorStore
from reportcert.synthetic import synthetic_vectors


@pytest.fixture
def axis_store():
    """Two orthogonal words plus one halfway between them."""
    return WordVectorStore({"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [1.0, 1.0]}, 2)


@pytest.fixture(scope="session")
def synth_store():
    return WordVectorStore(synthetic_vectors(0), None)


@pytest.fixture(scope="session")
def random_store():
    rng = np.random.default_rng(7)
    words = [f"w{i}" for i in range(40)]
    return WordVectorStore({w: rng.standard_normal(8) for w in words}, 8)


@pytest.fixture
def synth_embedder(synth_store):
    return Embedder(synth_store)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number][1])
