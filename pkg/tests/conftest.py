import numpy as np
import pytest

from ghz_witness import oracle


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_density(rng):
    def make(n):
        return oracle.wishart_state(n, rng)

    return make


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    if module is None or not module.REPORTED:
        return
    terminalreporter.section("acceptance")
    for number in sorted(module.REPORTED):
        terminalreporter.write_line(module.REPORTED[number].line())
