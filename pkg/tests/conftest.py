import sys

import pytest

from polydiag import load_fixture, parse_partition

# Named subspaces of the four-cell lattice fixture, as canonical labels.
QUTRO = {
    "P1": "1,-1,0,0",
    "P2": "1,1,2,-2",
    "P3": "0,1,-1,1",
    "P4": "1,0,-1,1",
    "P5": "1,1,0,0",
    "P6": "1,1,2,2",
    "P7": "1,2,3,-3",
    "P8": "1,1,2,3",
    "P9": "1,2,0,0",
    "P10": "1,1,1,1",
    "P11": "1,1,-1,1",
    "P12": "1,1,2,1",
    "P13": "1,2,3,3",
    "full": "1,2,3,4",
    "null": "0,0,0,0",
}


def qp(name):
    return parse_partition(QUTRO[name], 4)


@pytest.fixture(scope="session")
def qutro():
    return load_fixture("ex_qutro")


@pytest.fixture(scope="session")
def fx():
    return load_fixture


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
