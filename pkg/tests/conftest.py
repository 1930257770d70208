from helpers import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        status, title, secs = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d} {status}  {title}  ({secs:.2f}s)")
