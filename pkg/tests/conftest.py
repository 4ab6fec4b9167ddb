import numpy as np
import pytest
from hypothesis import settings

from mixfrac import Box, FnSpec, make_grid, sample

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit_square():
    return make_grid(Box((0.0, 0.0), (1.0, 1.0)), (32, 32))


def smooth_random(grid, seed, radius=0.4):
    """A nonnegative smooth bump centred in the grid box."""
    c = grid.box.center
    return sample(FnSpec.smooth_random(seed, radius / 3, c, radius), grid)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, title, passed, detail)``."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        print(line)
        _CRITERIA.append((number, line))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
