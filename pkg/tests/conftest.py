"""Shared pytest wiring: the acceptance suite's verdict summary.

Acceptance tests register one line per criterion; the lines are replayed
after the run by the terminal-summary hook so they stay visible even with
output capture on.
"""

_VERDICTS: list[str] = []


def record_verdict(line: str) -> None:
    print(line)
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
