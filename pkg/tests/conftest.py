import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Record one acceptance-criterion line for the terminal summary."""
    def _record(criterion, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}  {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
