import pytest

import oracle

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def oracle_rows_1e5():
    return oracle.gap_rows(10**5)


@pytest.fixture
def criterion():
    """Record one acceptance verdict line, then assert it."""

    def record(number: int, name: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
