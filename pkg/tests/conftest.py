import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from compbern.functions import CORPUS, CORPUS_BY_LABEL  # noqa: E402
from compbern.operator_core import OperatorParams  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"

# lines printed at the end of the session by the acceptance module
ACCEPTANCE_LINES = []


@pytest.fixture
def fn():
    return CORPUS_BY_LABEL


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN


@pytest.fixture
def params_small():
    return [OperatorParams(n, m) for n in range(1, 9) for m in range(1, 9)]


@pytest.fixture
def xs101():
    return np.linspace(0.0, 1.0, 101)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[-1])):
            terminalreporter.write_line(line)


__all__ = ["CORPUS", "ACCEPTANCE_LINES"]
