ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
