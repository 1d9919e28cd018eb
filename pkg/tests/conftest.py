import random

import pytest
from hypothesis import settings

from lyucalc.polyring import RingSpec

DEFAULT_SEED = 20240601

settings.register_profile("lyucalc", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("lyucalc")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks")
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow; pass --runslow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


def ideal(p, names, gens):
    ring = RingSpec(p, names)
    return ring, [ring.parse(g) for g in gens]


SKEW = ["x0*x2", "x0*x3", "x1*x2", "x1*x3"]
X4 = ["x0", "x1", "x2", "x3"]
X3 = ["x0", "x1", "x2"]
