"""Pytest configuration and fixtures.

Everything runs on deliberately coarse grids: an 8^3 lattice on a box of
half-length pi/2 (blocks -1..1), a 4^3 velocity grid on [-6, 6]^3 and a
six-node sigma rule.
"""

import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.kernel import CollisionKernel
from boltzbesov.collision.operators import CollisionOperator, operator_for
from boltzbesov.config import RuntimeConfig, SimulationConfig
from boltzbesov.kinetics.maxwellian import maxwellian_power
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField
from boltzbesov.verify.families import FieldFamily, VerifyContext

SMALL_KERNEL = {"theta_min": 0.5, "n_theta": 1, "n_psi": 2}


def small_config_dict(**overrides: object) -> dict:
    """Configuration mapping for a run that finishes in seconds."""
    data: dict = {
        "lattice": {"half_length": math.pi / 2, "points": 8},
        "velocity": {"half_width": 6.0, "points": 4},
        "kernel": dict(SMALL_KERNEL),
        "dt": 0.01,
        "t_final": 0.02,
        "scheme": "semi-implicit",
        "family": {
            "count": 2,
            "snapshots": 3,
            "refinements": [4],
            "lattice_refinements": [8, 16],
        },
    }
    data.update(overrides)
    return data


class ShiftedGain(CollisionOperator):
    """Strong operator whose gain carries a spurious multiple of g."""

    def gain(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return super().gain(f, g) + 1e6 * np.asarray(g)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def lattice():
    """8^3 lattice resolving blocks -1, 0 and 1."""
    return FrequencyLattice(half_length=math.pi / 2, points=8)


@pytest.fixture
def grid():
    return VelocityGrid(half_width=6.0, points=4)


@pytest.fixture
def kernel():
    """Soft-potential kernel with a coarse sigma rule."""
    return CollisionKernel(**SMALL_KERNEL)


@pytest.fixture
def operator(grid, kernel) -> CollisionOperator:
    return operator_for(grid, kernel)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def kinetic_field(lattice, grid, rng):
    """Smooth real kinetic field R(x, v) mu^(1/2)."""
    x = lattice.positions
    profile = 1.0 + 0.5 * np.sin(2.0 * x[0]) + 0.25 * np.cos(2.0 * x[1] - 2.0 * x[2])
    noise = rng.standard_normal(grid.size)
    values = profile[..., None] * (noise * maxwellian_power(grid, 0.5))[None, None, None, :]
    return SpectralField.from_physical(values, lattice, grid)


@pytest.fixture
def scalar_field(lattice):
    x = lattice.positions
    values = np.sin(2.0 * x[0]) + 0.5 * np.cos(4.0 * x[1]) + 0.3
    return SpectralField.from_physical(values, lattice)


@pytest.fixture
def small_config():
    return SimulationConfig.from_dict(small_config_dict())


@pytest.fixture
def transport_config():
    """Collisions switched off: the solver is exact free transport."""
    return SimulationConfig.from_dict(small_config_dict(include_collision=False))


@pytest.fixture
def runtime(temp_dir):
    return RuntimeConfig(seed=7, out_dir=temp_dir / "runs")


@pytest.fixture
def family(lattice, grid):
    return FieldFamily(seed=3, count=2, lattice=lattice, grid=grid)


@pytest.fixture
def zero_family(lattice, grid):
    return FieldFamily(seed=3, count=2, lattice=lattice, grid=grid, amplitude=0.0)


@pytest.fixture
def vctx(kernel):
    return VerifyContext(kernel=kernel)


@pytest.fixture
def config_file(temp_dir):
    """Write a small configuration and return its path."""

    def write(**overrides: object) -> Path:
        path = temp_dir / "config.json"
        path.write_text(json.dumps(small_config_dict(**overrides)))
        return path

    return write
