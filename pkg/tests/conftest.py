import pytest

_CRITERIA: list[str] = []


@pytest.fixture
def record_criterion():
    """Log a one-line PASS/FAIL verdict; the lines are repeated in the summary."""
    def record(line: str) -> None:
        _CRITERIA.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
