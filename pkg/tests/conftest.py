import math

import pytest

from pcgmub import GridSpec, gaussian_state


@pytest.fixture(scope="session")
def grid4096():
    return GridSpec.balanced(4096)


@pytest.fixture(scope="session")
def grid1024():
    return GridSpec.balanced(1024)


@pytest.fixture(scope="session")
def displaced(grid1024):
    """Coherent-like state off the origin with a momentum kick."""
    return gaussian_state(grid1024, center=1.3, width=0.9, tilt=0.7)


@pytest.fixture(scope="session")
def vacuum4096(grid4096):
    return gaussian_state(grid4096, width=1 / math.sqrt(2))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int(k.rstrip('*')), k)):
        terminalreporter.write_line(RESULTS[key])
