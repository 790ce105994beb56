"""Tests for the dyadic energy functionals."""

import numpy as np
import pytest
from pydantic import ValidationError

from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.energy import (
    EnergyFunctionalParams,
    decompose_block,
    energy_bound_terms,
    energy_Eq,
)
from boltzbesov.kinetics.maxwellian import maxwellian_power
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.spaces.partition import build_partition, chi_profile


def _macro_field(lattice, grid, a, b1):
    """(a(x) + v_1 b_1(x)) mu^1/2."""
    s = maxwellian_power(grid, 0.5)
    v1 = grid.velocities[:, 0]
    values = a[..., None] * s + b1[..., None] * (v1 * s)
    return SpectralField.from_physical(values, lattice, grid)


def test_params_validation():
    EnergyFunctionalParams(delta2=0.1, delta3=0.01)
    with pytest.raises(ValidationError, match="delta3"):
        EnergyFunctionalParams(delta2=0.01, delta3=0.1)
    with pytest.raises(ValidationError):
        EnergyFunctionalParams(delta2=1.5, delta3=0.1)


def test_zero_field_has_zero_energy(lattice, grid):
    zero = SpectralField.zeros(lattice, grid)

    parts = energy_Eq(zero, 0)

    assert parts.to_dict() == {"E1": 0.0, "E2": 0.0, "E3": 0.0, "total": 0.0}
    assert energy_bound_terms(zero, 0) == 0.0


def test_pure_density_has_no_energy(lattice, grid):
    """Test that a(x) mu^1/2 alone leaves every coupling term at zero."""
    x = lattice.positions
    g = _macro_field(lattice, grid, np.sin(2.0 * x[0]), np.zeros(lattice.shape))

    for q in (-1, 0, 1):
        assert energy_Eq(g, q).total == pytest.approx(0.0, abs=1e-8)


def test_density_velocity_coupling(lattice, grid):
    """Test E3_q = (Delta_q b, grad Delta_q a) for a = sin 2x_1, b_1 = cos 2x_1."""
    x = lattice.positions
    g = _macro_field(lattice, grid, np.sin(2.0 * x[0]), np.cos(2.0 * x[0]))
    part = build_partition(lattice)
    params = EnergyFunctionalParams(delta2=0.1, delta3=0.01)
    weight = float(chi_profile(np.array([1.0]))[0])

    parts = energy_Eq(g, 0, params, part)

    assert parts.E1 == pytest.approx(0.0, abs=1e-8)
    assert parts.E2 == pytest.approx(0.0, abs=1e-8)
    assert parts.E3 == pytest.approx(weight**2 * lattice.volume, rel=1e-9)
    assert parts.total == pytest.approx(0.01 * parts.E3)
    assert energy_bound_terms(g, 0, part) > 0.0


def test_decompose_block_separates_micro_part(kinetic_field):
    blocks = decompose_block(kinetic_field, 0)

    assert blocks.a.tail == ()
    assert blocks.b.tail == (3,)
    assert blocks.g2.grid is kinetic_field.grid


def test_energy_needs_kinetic_field(scalar_field):
    with pytest.raises(ArgumentError):
        energy_Eq(scalar_field, 0)
