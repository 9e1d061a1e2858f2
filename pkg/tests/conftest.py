import sys


def pytest_terminal_summary(terminalreporter):
    # repeat the acceptance lines, which pytest would otherwise capture
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
