import os
import sys

import pytest

# tableau and edge assertions on every mutation
os.environ.setdefault("PYROFUSE_DEBUG", "1")
sys.path.insert(0, os.path.dirname(__file__))

from pyrofuse import percolation  # noqa: E402
from pyrofuse.stabilizer import state  # noqa: E402

state.DEBUG = True
percolation.DEBUG = True

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_acceptance():
    def record(number: int, passed: bool, detail: str):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
