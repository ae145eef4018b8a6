"""Shared fixtures: grids and the expensive pipeline products."""

import numpy as np
import pytest

from qlelab.embedding import solve_weyl
from qlelab.initialdata import composite_data, coordinate_sphere, schwarzschild_data
from qlelab.optimizer import large_sphere_sweep
from qlelab.sphere import make_grid

# Isotropic radius of the areal-radius-4 sphere for m = 1:
# r (1 + 1/2r)^2 = 4  =>  r = (3 + 2 sqrt 2)/2.
R_ISO_AREAL4 = (3.0 + 2.0 * np.sqrt(2.0)) / 2.0
M_BY_AREAL4 = 4.0 - 2.0 * np.sqrt(2.0)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16)


@pytest.fixture(scope="session")
def grid24():
    return make_grid(24)


@pytest.fixture(scope="session")
def schw_sphere4(grid24):
    """(surface, surface_data) for Schwarzschild m=1 at areal radius 4."""
    sd = coordinate_sphere(schwarzschild_data(1.0), R_ISO_AREAL4, grid24)
    sol = solve_weyl(sd.metric)
    return sol.surface, sd


@pytest.fixture(scope="session")
def composite_rows(grid24):
    """Sweep rows for the composite family (m=1, P=(0.3,0,0)) at r=50,100,200."""
    data = composite_data(1.0, (0.3, 0.0, 0.0))
    return large_sphere_sweep(data, [50.0, 100.0, 200.0], grid24, seed=0)
