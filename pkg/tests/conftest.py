import numpy as np
import pytest

from qpsf.grids import PhaseGrid, PositionGrid


@pytest.fixture(scope="session")
def ref_grid():
    """The reference grid used throughout: n=512 on [-12, 12), hbar=1."""
    return PositionGrid.from_span(-12.0, 12.0, 512)


@pytest.fixture(scope="session")
def small_grid():
    return PositionGrid.from_span(-10.0, 10.0, 128)


@pytest.fixture()
def rng():
    return np.random.default_rng(20020710)
