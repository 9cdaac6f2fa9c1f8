import pytest

from softtile.cluster import default_manticore_cluster, die_outline
from softtile.config import FloorplanConfig

PAPER_ASPECTS = (0.4, 1.0, 2.5)


@pytest.fixture(scope="session")
def spec():
    return default_manticore_cluster()


@pytest.fixture(scope="session")
def cfg():
    return FloorplanConfig()


@pytest.fixture(scope="session")
def paper_dies(spec):
    return {q: die_outline(spec, q) for q in PAPER_ASPECTS}
