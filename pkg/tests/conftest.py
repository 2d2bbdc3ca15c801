import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from odvs.grid import GridParams  # noqa: E402


def make_grid(vg, z=0.1, r_over_x=2.0):
    return GridParams.from_scr(vg, 1.0 / z, r_over_x)


@pytest.fixture
def grid_a():
    """Post-fault grid of the deep-dip case: vg 0.4, SCR 10, r/x 2."""
    return make_grid(0.4)
