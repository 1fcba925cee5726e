import pytest
from hypothesis import HealthCheck, settings

from coarse_ends import zoo

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def Z():
    return zoo.integers()


@pytest.fixture(scope="session")
def N():
    return zoo.naturals()


# every zoo kind, at a size where balls of radius 8 stay small
ZOO_SPACES = {
    "N": zoo.naturals(),
    "Z": zoo.integers(),
    "Z2l1": zoo.lattice(2, "l1"),
    "Z2linf": zoo.lattice(2, "linf"),
    "Z3": zoo.lattice(3, "l1"),
    "tree2": zoo.tree(2),
    "F2": zoo.free_group(2),
    "heis": zoo.matrix_group([[[1, 1, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 1], [0, 0, 1]]]),
    "ZuZ": zoo.disjoint_union(zoo.integers(), zoo.integers()),
    "2Z": zoo.rescale(zoo.integers(), 2),
}


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
