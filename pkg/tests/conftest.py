import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "lab",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lab")

GAUSS_SEED = 20240
COIN_SEED = 31337
MARKOV_SEED = 4242
TEN_MILLION = 10_000_000


@pytest.fixture(scope="session")
def gauss_1e7():
    """10^7 continued-fraction digits plus their generation time."""
    from normlab import sources

    t0 = time.perf_counter()
    arr = sources.gauss_digit_stream(GAUSS_SEED).prefix(TEN_MILLION)
    return arr, time.perf_counter() - t0


@pytest.fixture(scope="session")
def coin_1e7():
    from normlab import sources

    return sources.bernoulli_stream((0.5, 0.5), COIN_SEED).prefix(TEN_MILLION)


@pytest.fixture(scope="session")
def markov_1e7():
    from normlab import sources

    return sources.markov_stream(
        [[0.9, 0.1], [0.1, 0.9]], seed=MARKOV_SEED
    ).prefix(TEN_MILLION)
