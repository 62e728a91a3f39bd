import os

import pytest

# keep the user's cache untouched: library keys stay in memory during tests
os.environ.pop("F2RANK2_CACHE", None)


@pytest.fixture
def cat():
    from f2rank2 import catalog

    return catalog


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import summary_lines
    except ImportError:
        return
    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
