import pytest


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def criterion(request):
    """Record one summary line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str):
        flag = "PASS" if passed else "FAIL"
        request.config.acceptance_lines[number] = f"[{flag}] criterion {number}: {title} -- {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
