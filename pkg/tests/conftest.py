import pytest

ACCEPTANCE = []


def record(label, ok, detail):
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE.append((label, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)
