import pytest

from deltaramsey import catalog
from deltaramsey.recurrence import clear_caches


@pytest.fixture(autouse=True)
def _fresh_caches():
    clear_caches()
    yield


@pytest.fixture
def z4():
    return catalog("Z4")


@pytest.fixture
def z5():
    return catalog("Z5")


@pytest.fixture
def z6():
    return catalog("Z6")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
