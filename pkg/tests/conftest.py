import numpy as np
import pytest

from greenbench.lacore import csr_from_triplets
from greenbench.phases import PhaseSchedule

# 5x5 worked example, row by row
WORKED_DENSE = np.array(
    [
        [-5, 1, 0, 0, 0],
        [0, 8, 7, 0, 0],
        [2, 0, 10, 0, 0],
        [0, 4, 0, 2, 9],
        [0, 0, -3, 0, 7],
    ],
    dtype=float,
)


def worked_triplets():
    r, c = np.nonzero(WORKED_DENSE)
    return [(int(i), int(j), float(WORKED_DENSE[i, j])) for i, j in zip(r, c)]


@pytest.fixture
def worked_matrix():
    return csr_from_triplets(5, 5, worked_triplets())


def three_step_schedule():
    return PhaseSchedule.from_durations([("idle", 1.0), ("kernel", 2.0), ("idle", 1.0)])


@pytest.fixture
def step_schedule():
    return three_step_schedule()


# criterion -> (passed, detail); filled by test_acceptance, printed at session end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
