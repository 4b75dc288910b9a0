"""Shared pytest wiring.

test_acceptance registers one verdict line per numbered criterion; printing
them from a terminal-summary hook keeps the lines visible even though pytest
captures ordinary stdout of passing tests.
"""

from __future__ import annotations

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
