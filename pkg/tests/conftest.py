import numpy as np
import pytest

from critlab.cache import GridCache
from critlab.primes import sieve_primes


@pytest.fixture(scope="session")
def primetable():
    return sieve_primes(2_000_003)


@pytest.fixture(scope="session")
def shared_cache(tmp_path_factory):
    return GridCache(directory=str(tmp_path_factory.mktemp("gridcache")), workers=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
