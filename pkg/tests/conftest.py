"""Shared test plumbing: the acceptance criterion report.

Acceptance tests register one line per criterion; the hook below prints the
collected table after the run so the pass/fail status of every criterion is
visible in plain pytest output without -s.
"""

ACCEPTANCE_LINES = []


def record_criterion(number: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append((number, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_LINES):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
