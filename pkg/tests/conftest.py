import time

import pytest

_LINES: list[str] = []


class _Criterion:
    """Records one PASS/FAIL line; the line is printed in the terminal summary."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def finish(self, ok: bool, detail: str) -> None:
        line = (f"{'PASS' if ok else 'FAIL'} criterion {self.number} ({self.title}): "
                f"{detail} [{self.elapsed:.2f}s]")
        _LINES.append(line)
        print(line)
        assert ok, line


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
