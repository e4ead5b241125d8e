import pytest

_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one ``PASS``/``FAIL`` line per acceptance criterion."""

    def _report(number: int, name: str, ok: bool, detail: str) -> bool:
        _LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} -- {detail}")
        print(_LINES[-1])
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
