import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the terminal summary."""

    def record(number, title, passed, detail=""):
        _CRITERIA[number] = (title, bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {number}: {verdict}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
