import pytest

from affordance_forge.core.store import DatasetStore
from affordance_forge.fixtures import build_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory) -> DatasetStore:
    """Five sweeping scenes; enough for unit tests that need real records."""
    root = tmp_path_factory.mktemp("small_corpus")
    return build_corpus(root, n=5, novel_count=1)


@pytest.fixture(scope="session")
def full_corpus(tmp_path_factory) -> DatasetStore:
    """The paper-scale 50-record human corpus (10 tagged 'novel')."""
    root = tmp_path_factory.mktemp("full_corpus")
    return build_corpus(root, n=50, novel_count=10)
