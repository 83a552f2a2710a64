import numpy as np
import pytest

from cryptononlocal.ensembles import random_schmidt
from cryptononlocal.operators import Side
from cryptononlocal.states import SchmidtBasis, make_state

DIMS = [2, 3, 4, 5, 6]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=DIMS, ids=lambda n: f"N{n}")
def dim(request):
    return request.param


@pytest.fixture
def random_state(rng, dim):
    return make_state(random_schmidt(rng, dim))


@pytest.fixture
def qubit_state():
    return make_state(SchmidtBasis.standard(2))


def bases(state):
    return state.basis(Side.ALICE), state.basis(Side.BOB)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion, printed in the summary."""

    def record(number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> None:
        in_time = elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        line = f"criterion {number:2d} {status}  {title}  ({elapsed:.2f}s / limit {limit:g}s){'  ' + detail if detail else ''}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
        assert in_time, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
