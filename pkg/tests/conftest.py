import re

import pytest

VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion and return the outcome."""
    lines = request.config.stash[VERDICTS]

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} #{number} {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(re.search(r"#(\d+)", s).group(1))):
        terminalreporter.write_line(line)
