"""Shared fixtures and the acceptance summary hook.

Acceptance tests register one verdict per criterion; the terminal summary
prints exactly one PASS/FAIL line for each, whatever pytest's own outcome
display says.
"""

import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str = ""):
    ACCEPTANCE[number] = (bool(ok), detail)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        verdict = "PASS" if ok else "FAIL"
        suffix = f" [{detail}]" if detail else ""
        terminalreporter.write_line(f"criterion {number}: {verdict}{suffix}")
