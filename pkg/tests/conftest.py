import pytest

# criterion number -> (title, passed, detail); filled by tests/test_acceptance.py
CRITERIA_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA_RESULTS):
        title, ok, detail = CRITERIA_RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} | {detail}")
