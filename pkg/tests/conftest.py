import numpy as np
import pytest

_criteria = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record_criterion():
    def record(number, name, ok, detail):
        _criteria.append((number, name, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {name}: {detail}")
