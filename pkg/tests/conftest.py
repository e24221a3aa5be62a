import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record a named acceptance criterion's outcome for the summary."""

    def record(name, ok, detail):
        _ACCEPTANCE.append((name, bool(ok), detail))
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
