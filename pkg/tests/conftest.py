import pytest

from moufang import models, octonion


@pytest.fixture(scope="session")
def o16():
    return octonion.o16_loop()


@pytest.fixture(scope="session")
def loop_o16(o16):
    return models.loop_bialgebra(o16)


@pytest.fixture(scope="session")
def fn_o16(o16):
    return models.function_bialgebra(o16)


@pytest.fixture(scope="session")
def binomial6():
    return models.truncated_binomial_bialgebra(6)
