import pytest

from motext.hopf import A, A1, sphere
from motext.resolve import ExtChart, Resolution


@pytest.fixture(scope="session")
def a1_chart():
    """Ext over A(1) for t <= 20, f <= 11."""
    return ExtChart(Resolution(A1, sphere(), 20, 11))


@pytest.fixture(scope="session")
def a_chart():
    """Ext over A for t <= 26, f <= 12."""
    return ExtChart(Resolution(A, sphere(), 26, 12))


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(number, title, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {title}" + (f" | {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
