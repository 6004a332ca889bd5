import random
from pathlib import Path

import pytest

from scmatroid.services.symbolicCore import ParamSpace, Polynomial, RationalFunction
from scmatroid.services.systemFileService import load_system

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def fixture_system(name: str):
    return load_system(FIXTURES / f"{name}.json")


def random_polynomial(space: ParamSpace, rng: random.Random, terms: int = 3, max_degree: int = 2) -> Polynomial:
    data = {}
    for _ in range(rng.randint(1, terms)):
        exps = tuple(rng.randint(0, max_degree) for _ in space.variables)
        data[exps] = rng.randint(-5, 5)
    return Polynomial.from_terms(space, data)


def random_rational(space: ParamSpace, rng: random.Random) -> RationalFunction:
    den = random_polynomial(space, rng, terms=2, max_degree=1)
    while den.is_zero:
        den = random_polynomial(space, rng, terms=2, max_degree=1)
    return RationalFunction(random_polynomial(space, rng), den)


@pytest.fixture
def space():
    return ParamSpace(["z1", "z2", "z3"])


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def example1():
    return fixture_system("example1_composite")


@pytest.fixture(scope="session")
def sigma1():
    return fixture_system("example1_sigma1")


@pytest.fixture(scope="session")
def sigma2():
    return fixture_system("example1_sigma2")


@pytest.fixture(scope="session")
def pendulum():
    return fixture_system("pendulum")


@pytest.fixture(scope="session")
def bridge():
    return fixture_system("bridge")
