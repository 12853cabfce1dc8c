import pytest

from dunklalg.coxeter import System


@pytest.fixture(scope="session")
def sys_b1():
    return System.build("B1")


@pytest.fixture(scope="session")
def sys_a1():
    return System.build("A1")


@pytest.fixture(scope="session")
def sys_a1a1():
    return System.build("A1xA1")


@pytest.fixture(scope="session")
def sys_b2():
    return System.build("B2")


@pytest.fixture(scope="session")
def sys_a2():
    return System.build("A2")
