"""Shared fixtures for the schattenlab test suite."""

import pytest

from schattenlab.core.config import ConfigManager, set_config
from schattenlab.numerics.quadrature import GridSpec


@pytest.fixture(autouse=True)
def fresh_global_config():
    yield
    set_config(ConfigManager())


@pytest.fixture
def coarse_grid() -> GridSpec:
    """A grid cheap enough for nested quadrature in unit tests."""
    return GridSpec(
        r_max=1.0 - 2.0**-8,
        level_step=1.0,
        radial_order=6,
        angular_base=16,
        angular_max=128,
        angular_order=6,
        depth=24,
    )


@pytest.fixture
def full_disk() -> GridSpec:
    return GridSpec(r_max=1.0)
