import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record a PASS/FAIL line that is echoed at the end of the run."""

    def record(line):
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
