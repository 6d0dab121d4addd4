from fractions import Fraction

import numpy as np
import pytest

# acceptance criteria register "criterion -> (passed, detail)" here
ACCEPTANCE_RESULTS: dict = {}


def rational_matrix(rng, rows, cols, bound=9):
    nums = rng.integers(-bound, bound + 1, size=(rows, cols))
    dens = rng.integers(1, bound + 1, size=(rows, cols))
    out = np.empty((rows, cols), dtype=object)
    for idx in np.ndindex(rows, cols):
        out[idx] = Fraction(int(nums[idx]), int(dens[idx]))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
