from fractions import Fraction

import pytest

from evidencelab import Frame, MassFunction
from evidencelab.replication import table1

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def d_frame():
    return Frame(["d1", "d2", "d3"])


@pytest.fixture
def table1_mass(d_frame):
    f = d_frame
    return MassFunction(
        f,
        [
            (f.subset(["d1"]), Fraction(2, 5)),
            (f.subset(["d3"]), Fraction(1, 5)),
            (f.subset(["d2", "d3"]), Fraction(2, 5)),
        ],
    )


@pytest.fixture
def table1_data():
    return table1()
