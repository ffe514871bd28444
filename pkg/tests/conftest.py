import pytest

from blinecox.geometry import BlcpModel, BlpModel


@pytest.fixture(scope="session")
def blp10():
    return BlpModel(n_b=10, radius=50.0)


@pytest.fixture(scope="session")
def blcp10(blp10):
    return BlcpModel(blp10, intensity=0.1)
