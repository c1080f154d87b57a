import sys

import pytest


@pytest.fixture(scope="session")
def hm():
    from airykit.painleve import default_solution
    return default_solution()


@pytest.fixture(scope="session")
def endpoint_grid():
    from airykit.distributions import endpoint_marginals
    return endpoint_marginals()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
