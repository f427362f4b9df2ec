import sys

import numpy as np
import pytest

from treekummer.transform import ParamMatrix
from treekummer.trees import chain, star


@pytest.fixture
def chain3():
    return chain(3)


@pytest.fixture
def daisy():
    # 1-based petals 1, 2, 3 and centre 4 become 0, 1, 2 and 3
    return star(4)


@pytest.fixture
def chain3_unit(chain3):
    return ParamMatrix.constant(chain3, 1.0)


@pytest.fixture
def daisy_unit(daisy):
    return ParamMatrix.constant(daisy, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)



def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
