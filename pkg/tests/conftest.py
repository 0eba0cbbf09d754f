import random

import pytest

from pfaffform.corpus import load_example, random_suite
from pfaffform.graph import parse_graph


@pytest.fixture
def dunce():
    return load_example("dunces_cap")


@pytest.fixture
def theta():
    return load_example("theta")


@pytest.fixture
def triangle():
    return load_example("triangle")


@pytest.fixture(scope="session")
def suite50():
    return random_suite(seed=0, count=50)


@pytest.fixture
def rng():
    return random.Random(12345)


def graph(text):
    return parse_graph(text)
