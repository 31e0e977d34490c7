"""Shared acceptance reporting: criterion tests register a verdict that the
terminal summary prints as one PASS/FAIL line per criterion."""

_ACCEPTANCE: list = []


def record_acceptance(number: int, title: str, passed: bool, detail: str = "") -> None:
    """Register the verdict for one acceptance criterion and enforce it."""
    _ACCEPTANCE.append((int(number), title, bool(passed), detail))
    assert passed, f"acceptance criterion {number} failed: {title} [{detail}]"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'} - {title}"
        if detail:
            line += f" | {detail}"
        terminalreporter.write_line(line)
