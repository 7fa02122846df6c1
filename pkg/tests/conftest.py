import numpy as np
import pytest

from wtlab.acceptance import lebesgue_sigma, three_atoms, two_atoms
from wtlab.spectral_measure import MatrixMeasure, lattice_measure


@pytest.fixture
def single():
    return MatrixMeasure.atomic([0.0], [1.0])


@pytest.fixture
def pair():
    return two_atoms()


@pytest.fixture
def triple():
    return three_atoms()


@pytest.fixture
def lattice():
    return lattice_measure(1.0, 20)


@pytest.fixture
def lebesgue2():
    return lebesgue_sigma(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
