import numpy as np
import pytest

from gmhd2d.kernel import LogWeak, PowerLaw
from gmhd2d.spectral import SpectralGrid, symbol_for_grid


@pytest.fixture(scope="session")
def grid64():
    return SpectralGrid(64)


@pytest.fixture(scope="session")
def grid128():
    return SpectralGrid(128)


@pytest.fixture(scope="session")
def logweak11():
    return LogWeak(eps1=1.0, eps2=1.0)


@pytest.fixture(scope="session")
def sym_lw_64(grid64, logweak11):
    return symbol_for_grid(logweak11, grid64)


@pytest.fixture(scope="session")
def sym_half_64(grid64):
    return symbol_for_grid(PowerLaw(alpha=0.5), grid64)


def random_band_hat(grid, seed, kmin=2, kmax=8):
    """Hermitian band-limited random spectral field with zero mean."""
    rng = np.random.default_rng(seed)
    hat = grid.forward(rng.standard_normal((grid.n, grid.n)))
    band = (grid.kmag >= kmin) & (grid.kmag <= kmax)
    hat = np.where(band, hat, 0.0)
    hat[0, 0] = 0.0
    return hat
