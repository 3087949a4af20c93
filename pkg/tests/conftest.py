from __future__ import annotations

from typing import Callable

import pytest

_LINES = pytest.StashKey[list[str]]()


@pytest.fixture
def acceptance(request: pytest.FixtureRequest) -> Callable[[str, bool | str, str], None]:
    """Record one pass/fail line per acceptance criterion; the lines are printed in the summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(criterion: str, ok: bool | str, detail: str) -> None:
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        line = f"{status:<5} {criterion}: {detail}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter: pytest.TerminalReporter, exitstatus: int, config: pytest.Config) -> None:
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
