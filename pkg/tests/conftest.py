import pytest

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance_record():
    def record(number: int, line: str) -> None:
        ACCEPTANCE_LINES[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
