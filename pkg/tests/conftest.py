import pytest

_LINES = []


@pytest.fixture
def report():
    """Collect one summary line per acceptance criterion."""
    def add(result):
        line = result.line()
        print(line)
        _LINES.append(line)
        return result
    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
