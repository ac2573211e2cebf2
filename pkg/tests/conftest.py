import numpy as np
import pytest

from resonwave.model import (PotentialSpec, UniformGrid, cutoff_window,
                             sample_state, ContourSpec)


@pytest.fixture(scope="session")
def grid():
    return UniformGrid(-5.0, 5.0, 1281)


@pytest.fixture(scope="session")
def window(grid):
    return cutoff_window(3, grid)


@pytest.fixture(scope="session")
def contour():
    return ContourSpec(eps=0.05, g0_level=0.05, gstar_eta=1.0,
                       gstar_etatilde=0.05, im_truncation=40.0, quad_tol=1e-5)


@pytest.fixture(scope="session")
def delta_m2():
    return PotentialSpec.delta(-2.0)


@pytest.fixture(scope="session")
def delta_p2():
    return PotentialSpec.delta(2.0)


@pytest.fixture(scope="session")
def well5():
    return PotentialSpec.square_well(5.0)


@pytest.fixture(scope="session")
def bump(grid):
    # centered off the origin so no eigenfunction is orthogonal to it by parity
    return sample_state("bump", {"center": 0.3, "radius": 0.6}, grid)


@pytest.fixture(scope="session")
def bump_off(grid):
    # support [0.2, 2.2] avoids the delta site at 0
    return sample_state("bump", {"center": 1.2, "radius": 1.0}, grid)


@pytest.fixture(scope="session")
def indicator(grid):
    return sample_state("indicator", {"a": -1.0, "b": 1.0}, grid)
