import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def j_swap():
    """Non-integrable structure with (1,0)-forms e1 + i e5, e2 + i e6, e3 + i e4."""
    from iwasawa.acstruct import acs_from_forms

    rows = np.zeros((3, 6), dtype=complex)
    rows[0, [0, 4]] = 1, 1j
    rows[1, [1, 5]] = 1, 1j
    rows[2, [2, 3]] = 1, 1j
    return acs_from_forms(rows)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion; raises on failure."""

    def record(number, ok, detail, elapsed=None):
        status = "PASS" if ok else "FAIL"
        timing = f" [{elapsed:.1f} s]" if elapsed is not None else ""
        line = f"criterion {number:2d}: {status}  {detail}{timing}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
