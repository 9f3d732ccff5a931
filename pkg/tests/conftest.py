import math

import pytest

from raman_multiplex.fock_oracle import FockBasis
from raman_multiplex.physical_config import CouplingParams


@pytest.fixture
def quarter_beat():
    """g1 = 0.6, g-1 = 0.8, Delta = 0 at g t = pi/2: the probe is fully emptied."""
    return CouplingParams(0.6, 0.8, 0.0, math.pi / 2)


@pytest.fixture
def detuned():
    return CouplingParams(0.6, 0.8, 0.5, 1.3)


@pytest.fixture(scope="session")
def basis():
    return FockBasis(10)


@pytest.fixture(scope="session")
def wide_basis():
    return FockBasis(16)

