import pytest

from bankrisk.dataset import encode, load_bundled_corpus


@pytest.fixture(scope="session")
def corpus():
    return load_bundled_corpus()


@pytest.fixture(scope="session")
def corpus_matrix(corpus):
    return encode(corpus)
