"""Shared pytest hooks: the acceptance suite reports one line per criterion."""

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"AC{num:02d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
