import pytest

VERDICTS = []


@pytest.fixture
def verdict():
    """Record a one-line PASS/FAIL verdict; the line is echoed at the end of the run."""

    def _record(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip()
        print(line)
        VERDICTS.append(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)
