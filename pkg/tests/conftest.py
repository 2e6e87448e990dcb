import os

import pytest

from mtlforest.corpus import (
    algebra_corpus,
    chain_corpus,
    load_config,
)

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def chains6(cfg):
    """All MTL-chains up to 6 elements, one per isomorphism class."""
    return chain_corpus(cfg.chain_max)


@pytest.fixture(scope="session")
def algebras(cfg):
    return algebra_corpus(cfg)


@pytest.fixture(scope="session")
def data_dir():
    return DATA
