import pytest

# filled by test_acceptance.py: (criterion id, passed, detail)
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance_line(request):
    """Record a criterion result and echo it to the terminal right away."""
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(cid: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append((cid, passed, detail))
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(f"{cid} {'PASS' if passed else 'FAIL'}: {detail}")

    return emit


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda x: int(x[0][1:])):
        terminalreporter.write_line(f"{cid} {'PASS' if passed else 'FAIL'}: {detail}")
