import pytest

CRITERIA = range(1, 10)
_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the line is printed now and in the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _results[number] = (ok, detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in CRITERIA:
        ok, detail = _results.get(number, (False, "not run or raised before reporting"))
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
