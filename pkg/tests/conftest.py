import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from spanex.io import load_json
from spanex.oracle import mock_oracle

FIXTURES = TESTS / "fixtures"
GOLDEN = TESTS / "golden"


@pytest.fixture(scope="session")
def corpus():
    return load_json(FIXTURES / "snli_mock.json")


@pytest.fixture(scope="session")
def oracle():
    return mock_oracle()


@pytest.fixture()
def tiny(corpus):
    """The three hand-traceable instances, as their own dataset."""
    from spanex.types import Dataset

    return Dataset(
        name=corpus.name,
        instances=tuple(corpus.get(f"mock-{i:03d}") for i in (1, 2, 3)),
    )
