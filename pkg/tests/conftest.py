import numpy as np
import pytest

from langshift.patterns import Pattern
from langshift.preimage import PreimageQuery, preimages
from langshift.rule import Params


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    # first call compiles the search kernel; keep it out of timed tests
    preimages(PreimageQuery(Pattern.literal("3"), Params(2, 2)), budget=10)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
