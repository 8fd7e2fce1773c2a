import os
import sys
import time
from contextlib import contextmanager

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Context manager that records one pass/fail line per acceptance criterion."""

    @contextmanager
    def record(number, title):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            first = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            line = f"criterion {number:2d}: FAIL  {title}  ({first[:160]})"
            ACCEPTANCE_LINES[number] = line
            print(line)
            raise
        line = f"criterion {number:2d}: PASS  {title}  [{time.perf_counter() - start:.1f}s]"
        ACCEPTANCE_LINES[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
