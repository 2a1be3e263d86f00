import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, name, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{k}] {name}: {detail}")


@pytest.fixture
def record():
    """record(k, name, ok, detail) stores one acceptance line and prints it."""
    def _record(k, name, ok, detail):
        ACCEPTANCE[k] = (bool(ok), name, detail)
        print(f"{'PASS' if ok else 'FAIL'} [{k}] {name}: {detail}")
        return bool(ok)
    return _record
