"""Session-wide fixtures: grids are immutable, so they are shared freely."""

from __future__ import annotations

import numpy as np
import pytest

from binorm_gs.grid import make_grid


@pytest.fixture(scope="session")
def grid_1d():
    """Production-scale 1D grid (matches the solver default)."""
    return make_grid(1, 4096, 64.0)


@pytest.fixture(scope="session")
def grid_small():
    """Cheap 1D grid for random-state identities and finite differences."""
    return make_grid(1, 256, 32.0)


@pytest.fixture(scope="session")
def grid_2d_small():
    return make_grid(2, 64, 16.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
