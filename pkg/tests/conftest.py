"""Shared pytest wiring.

The acceptance tests report one PASS/FAIL line each; collecting them
here and printing them in the terminal summary keeps the lines visible
in captured runs.
"""

_ACCEPTANCE_LINES = []


def record_acceptance(name: str, passed: bool, detail: str):
    _ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.line(line)
