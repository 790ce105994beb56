"""Tests for the paraproduct decomposition."""

import math

import numpy as np
import pytest

from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.bony import bony_decompose, paraproduct_terms
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField


def test_parts_sum_to_pointwise_product(scalar_field, lattice):
    x = lattice.positions
    g = SpectralField.from_physical(np.cos(6.0 * x[2]) + 0.2 * np.sin(2.0 * x[1]), lattice)

    parts = bony_decompose(scalar_field, g)
    product = scalar_field.to_physical() * g.to_physical()

    np.testing.assert_allclose(parts.total().to_physical(), product, atol=1e-12)


def test_paraproduct_terms_sum_to_paraproduct(scalar_field, lattice):
    x = lattice.positions
    g = SpectralField.from_physical(np.cos(6.0 * x[2]), lattice)

    parts = bony_decompose(scalar_field, g)
    terms = paraproduct_terms(scalar_field, g)

    assert sorted(terms) == [1]
    np.testing.assert_allclose(
        sum(t.coeffs for t in terms.values()), parts.paraproduct_fg.coeffs, atol=1e-13
    )


def test_constant_factor_is_pure_paraproduct(lattice):
    """Test that T_1 g carries everything once g has no low blocks."""
    one = SpectralField.from_physical(np.ones(lattice.shape), lattice)
    x = lattice.positions
    g = SpectralField.from_physical(np.cos(6.0 * x[0]), lattice)

    parts = bony_decompose(one, g)

    np.testing.assert_allclose(parts.paraproduct_fg.coeffs, g.coeffs, atol=1e-13)
    np.testing.assert_allclose(parts.paraproduct_gf.coeffs, 0.0, atol=1e-13)


def test_kinetic_factors(kinetic_field):
    parts = bony_decompose(kinetic_field, kinetic_field)

    assert parts.total().grid is kinetic_field.grid
    np.testing.assert_allclose(
        parts.paraproduct_fg.coeffs, parts.paraproduct_gf.coeffs, atol=1e-13
    )


def test_mismatched_lattices(scalar_field):
    other = SpectralField.zeros(FrequencyLattice(half_length=math.pi, points=8))

    with pytest.raises(ArgumentError):
        bony_decompose(scalar_field, other)
