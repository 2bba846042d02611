import numpy as np
import pytest

from src.domain.sgevolve import Particle


@pytest.fixture
def neutron():
    return Particle.neutron()


@pytest.fixture
def unit_particle():
    """hbar = m = mu = 1, so p' = b tau and the shift is b tau^2 / 2."""
    return Particle(mass=1.0, magnetic_moment=1.0, hbar=1.0, name="unit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
