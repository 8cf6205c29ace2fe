import random

import pytest

from cpnet.build import polygon, series_pair, single_edge, star
from cpnet.conductance import Linear


@pytest.fixture
def star3():
    return star(3, [Linear(1.0), Linear(1.0), Linear(1.0)])


@pytest.fixture
def star3_123():
    return star(3, [Linear(1.0), Linear(2.0), Linear(3.0)])


@pytest.fixture
def edge_c5():
    return single_edge(Linear(5.0))


@pytest.fixture
def triangle_net():
    return polygon(3, [Linear(1.0), Linear(2.0), Linear(3.0)])


@pytest.fixture
def rng():
    return random.Random(20260810)


def pytest_addoption(parser):
    parser.addoption(
        "--acceptance-seed", action="store", default="0", help="seed for acceptance suites"
    )
