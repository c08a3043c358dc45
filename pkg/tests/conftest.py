import pytest

from miniscp.harness import Corpus, artifacts, default_corpus


@pytest.fixture(scope="session")
def full_corpus() -> Corpus:
    return default_corpus(seed=7)


@pytest.fixture(scope="session")
def small_corpus() -> Corpus:
    # same shape as the default corpus, scaled down for module tests
    return Corpus(("a", "ab", "aa", "aab", "ababa"), exhaustive_len=6,
                  random_count=120, random_max_len=60, seed=7)


@pytest.fixture(scope="session")
def aab():
    return artifacts("aab")


@pytest.fixture(scope="session")
def ababa():
    return artifacts("ababa")
