import pytest

from stvss.construct import StvssParams, build
from stvss.core import builtin_pair

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def dup22_pair():
    """The (2,3) scheme duplicated twice in each direction."""
    return build(builtin_pair("ex1_2_3"), StvssParams(2, 2))


@pytest.fixture
def dup21_pair():
    return build(builtin_pair("ex1_2_3"), StvssParams(2, 1))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
