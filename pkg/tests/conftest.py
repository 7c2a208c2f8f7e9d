import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    results = request.config.stash.setdefault(_RESULTS, {})

    def record(number, name, ok, detail):
        results[number] = f"criterion {number} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
