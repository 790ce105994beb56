"""Tests for the frequency lattice and spectral fields."""

import math

import numpy as np
import pytest

from boltzbesov.errors import ArgumentError, ConfigurationError
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField, divergence, gradient


@pytest.mark.parametrize("points", [4, 12, 0])
def test_lattice_rejects_bad_point_counts(points):
    """Test that N must be a power of two of at least 8."""
    with pytest.raises(ConfigurationError, match="power of two"):
        FrequencyLattice(half_length=math.pi, points=points)


def test_lattice_geometry(lattice):
    assert lattice.spacing == pytest.approx(2.0)
    assert lattice.volume == pytest.approx(math.pi**3)
    assert lattice.nyquist == pytest.approx(8.0)
    assert lattice.wavevectors.shape == (3, 8, 8, 8)
    assert lattice.magnitude[0, 0, 0] == 0.0


def test_constant_field_has_single_coefficient(lattice):
    """Test the norm="forward" convention."""
    f = SpectralField.from_physical(np.full(lattice.shape, 2.5), lattice)

    assert f.coeffs[0, 0, 0] == pytest.approx(2.5)
    assert np.count_nonzero(np.abs(f.coeffs) > 1e-14) == 1


def test_parseval(scalar_field, lattice):
    """Test that l2_norm matches the physical-space Riemann sum."""
    values = scalar_field.to_physical()
    physical = math.sqrt(lattice.dx**3 * float(np.sum(values**2)))

    assert scalar_field.l2_norm() == pytest.approx(physical, rel=1e-12)


def test_kinetic_parseval_includes_velocity_cells(kinetic_field, lattice, grid):
    values = kinetic_field.to_physical()
    physical = math.sqrt(lattice.dx**3 * grid.cell_volume * float(np.sum(values**2)))

    assert kinetic_field.l2_norm() == pytest.approx(physical, rel=1e-12)


def test_real_fields_are_hermitian(scalar_field, kinetic_field):
    assert scalar_field.is_hermitian()
    assert kinetic_field.is_hermitian()
    assert not scalar_field.with_coeffs(scalar_field.coeffs * 1j).is_hermitian()


def test_gradient_of_sine(lattice):
    """Test that the spectral gradient is exact for resolved modes."""
    x = lattice.positions
    f = SpectralField.from_physical(np.sin(2.0 * x[0]), lattice)

    grad = gradient(f).to_physical()

    np.testing.assert_allclose(grad[..., 0], 2.0 * np.cos(2.0 * x[0]), atol=1e-12)
    np.testing.assert_allclose(grad[..., 1:], 0.0, atol=1e-12)


def test_divergence_of_gradient_is_laplacian(lattice):
    x = lattice.positions
    f = SpectralField.from_physical(np.sin(2.0 * x[0]) * np.cos(4.0 * x[2]), lattice)

    lap = divergence(gradient(f)).to_physical()

    np.testing.assert_allclose(lap, -20.0 * f.to_physical(), atol=1e-10)


def test_divergence_needs_vector_tail(scalar_field):
    with pytest.raises(ArgumentError, match="vector"):
        divergence(scalar_field)


def test_arithmetic_checks_compatibility(lattice):
    other = FrequencyLattice(half_length=math.pi, points=8)
    f = SpectralField.zeros(lattice)
    g = SpectralField.zeros(other)

    with pytest.raises(ArgumentError, match="mismatched lattices"):
        f + g


def test_shape_mismatch_rejected(lattice, grid):
    with pytest.raises(ArgumentError):
        SpectralField(np.zeros((8, 8, 4), dtype=complex), lattice)
    with pytest.raises(ArgumentError, match="velocity axis"):
        SpectralField(np.zeros(lattice.shape + (3,), dtype=complex), lattice, grid)


def test_inner_product_matches_norm(kinetic_field):
    assert kinetic_field.inner(kinetic_field) == pytest.approx(kinetic_field.l2_norm() ** 2)


def test_weighted_needs_kinetic_field(scalar_field):
    with pytest.raises(ArgumentError, match="kinetic"):
        scalar_field.weighted(np.ones(4))
