"""Tests for random fields and initial data."""

import numpy as np
import pytest

from boltzbesov.config import InitialDatumSpec
from boltzbesov.kinetics.macro import project_P
from boltzbesov.solver.initial import (
    clip_nonnegative,
    initial_datum,
    random_kinetic_field,
    scale_to,
)
from boltzbesov.solver.ledger import min_distribution
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.spaces.norms import energy_norm


def test_random_field_is_real_and_seeded(lattice, grid):
    a = random_kinetic_field(lattice, grid, np.random.default_rng(1))
    b = random_kinetic_field(lattice, grid, np.random.default_rng(1))
    c = random_kinetic_field(lattice, grid, np.random.default_rng(2))

    assert a.is_hermitian()
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    assert not np.allclose(a.coeffs, c.coeffs)


def test_scale_to(kinetic_field, lattice, grid):
    scaled = scale_to(kinetic_field, 0.5)

    assert energy_norm(scaled) == pytest.approx(0.5)
    zero = SpectralField.zeros(lattice, grid)
    assert scale_to(zero, 0.5) is zero


def test_zero_datum(lattice, grid, rng):
    g0 = initial_datum(InitialDatumSpec(kind="zero"), lattice, grid, rng)

    assert not np.any(g0.coeffs)


def test_gaussian_datum_has_requested_size_and_positivity(lattice, grid, rng):
    """Test the amplitude and f0 = mu + mu^1/2 g0 >= 0."""
    spec = InitialDatumSpec(kind="gaussian", amplitude=1e-3)

    g0 = initial_datum(spec, lattice, grid, rng)

    assert energy_norm(g0) == pytest.approx(1e-3)
    assert min_distribution(g0) >= 0.0


def test_microscopic_datum_has_no_macro_part(lattice, grid, rng):
    spec = InitialDatumSpec(kind="microscopic", amplitude=1e-3)

    g0 = initial_datum(spec, lattice, grid, rng)
    _, pg = project_P(g0)

    assert pg.l2_norm() <= 1e-9 * g0.l2_norm()


def test_large_amplitude_is_clipped_to_nonnegative_f(lattice, grid, rng, caplog):
    """Test that the clip keeps f0 >= 0 once the scaled datum would dip below -mu."""
    spec = InitialDatumSpec(kind="gaussian", amplitude=1e6)

    with caplog.at_level("WARNING", logger="boltzbesov.solver.initial"):
        g0 = initial_datum(spec, lattice, grid, rng)

    assert "clipped" in caplog.text
    assert min_distribution(g0) >= -1e-8
    assert energy_norm(g0) < 1e6


def test_unclipped_large_amplitude_goes_negative(lattice, grid):
    spec = InitialDatumSpec(kind="gaussian", amplitude=1e6, nonnegative=False)

    g0 = initial_datum(spec, lattice, grid, np.random.default_rng(12345))

    assert energy_norm(g0) == pytest.approx(1e6)
    assert min_distribution(g0) < -1.0


def test_clip_leaves_small_data_alone(kinetic_field):
    small = scale_to(kinetic_field, 1e-6)

    assert clip_nonnegative(small) is small
