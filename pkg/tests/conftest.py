import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""

    def record(key, ok, detail):
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES[key] = line
        print(line)
        return ok

    return record


def _order(key):
    num = "".join(c for c in key if c.isdigit())
    return (int(num or 0), key)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=_order):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
