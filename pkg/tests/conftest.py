def pytest_terminal_summary(terminalreporter):
    from test_acceptance import SUMMARY

    if not SUMMARY:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(SUMMARY):
        for line in SUMMARY[number]:
            terminalreporter.write_line(line)
