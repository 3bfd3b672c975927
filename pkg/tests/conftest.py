import csv
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ei_reference():
    with open(DATA / "ei_reference.csv", newline="") as fh:
        return [(float(r["x"]), float(r["ei_x"])) for r in csv.DictReader(fh)]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
