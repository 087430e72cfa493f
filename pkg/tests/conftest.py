import _support


def pytest_terminal_summary(terminalreporter):
    if _support.ACCEPTANCE_STATUS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_support.ACCEPTANCE_STATUS):
            terminalreporter.write_line(_support.ACCEPTANCE_STATUS[num])
