import pytest

from kernelconv.grid import GridSpec

H = 1 / 64


@pytest.fixture(scope="session")
def grid():
    """The standard 256x256 window over [-2, 2]^2 (h = 1/64)."""
    return GridSpec.square(-2.0, 2.0, 256)


@pytest.fixture(scope="session")
def small_grid():
    """A coarse 64x64 window over [-2, 2]^2 (h = 1/16) for quick property tests."""
    return GridSpec.square(-2.0, 2.0, 64)
