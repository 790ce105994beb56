"""Tests for the triple norm, the dissipation functional and the reference oracles."""

import logging
import math

import numpy as np
import pytest

from boltzbesov.collision.norms import (
    TripleNormReport,
    dissipation_D,
    triple_norm,
    triple_norm_form,
    weighted_l2_norm,
    weighted_sobolev_norm,
)
from boltzbesov.collision.operators import operator_for
from boltzbesov.collision.oracles import (
    WeakStrongComparison,
    compare_weak_strong,
    naive_dissipation,
    naive_triple_norm,
)
from boltzbesov.kinetics.maxwellian import maxwellian, maxwellian_power

from tests.conftest import ShiftedGain


@pytest.fixture
def velocity_field(grid, rng):
    return rng.standard_normal(grid.size) * maxwellian_power(grid, 0.25)


def test_report_from_parts():
    report = TripleNormReport.from_parts(-1e-18, 2.0, tail=-0.1)

    assert report.J1 == 0.0
    assert report.total == 2.0
    assert report.tail == pytest.approx(0.1)
    assert report.norm == pytest.approx(np.sqrt(2.0))
    assert set(report.to_dict()) == {"J1", "J2", "total", "tail"}


def test_triple_norm_matches_naive_loop(velocity_field, kernel, grid):
    """Test the configuration sweep against the output-cell oracle."""
    report = triple_norm(velocity_field, kernel, grid)
    j1, j2 = naive_triple_norm(velocity_field, kernel, grid)

    assert report.J1 == pytest.approx(j1, rel=1e-9)
    assert report.J2 == pytest.approx(j2, rel=1e-9)
    assert report.tail > 0.0


def test_quadratic_form_matches_direct_sum(velocity_field, kernel, grid):
    form = triple_norm_form(grid, kernel)
    direct = triple_norm(velocity_field, kernel, grid)

    assert form.squared(velocity_field) == pytest.approx(direct.total, rel=1e-9)
    assert form.report(velocity_field).J2 == pytest.approx(direct.J2, rel=1e-9)
    np.testing.assert_allclose(form.matrix, form.matrix.T, atol=1e-12 * np.abs(form.matrix).max())


def test_form_is_batched(velocity_field, kernel, grid):
    form = triple_norm_form(grid, kernel)
    batch = np.stack([velocity_field, 3.0 * velocity_field])

    norms = form.norm(batch)

    assert norms[1] == pytest.approx(3.0 * norms[0])


def test_dissipation_matches_naive_loop(kernel, grid, velocity_field):
    mu = maxwellian(grid)

    value = dissipation_D(mu, velocity_field, kernel, grid)

    assert value > 0.0
    assert value == pytest.approx(naive_dissipation(mu, velocity_field, kernel, grid), rel=1e-9)


def test_dissipation_of_constant_is_small(kernel, grid):
    """Test that D(f, g) only sees differences of g."""
    mu = maxwellian(grid)
    varying = dissipation_D(mu, grid.speed_squared, kernel, grid)

    assert varying > 0.0
    assert dissipation_D(mu, np.zeros(grid.size), kernel, grid) == 0.0


def test_dissipation_warns_on_negative_f(kernel, grid, velocity_field, caplog):
    with caplog.at_level(logging.WARNING, logger="boltzbesov.collision.norms"):
        dissipation_D(-maxwellian(grid), velocity_field, kernel, grid)

    assert "min f" in caplog.text


def test_weighted_norms_reduce_to_l2(grid, velocity_field):
    plain = grid.norm(velocity_field)

    assert weighted_l2_norm(velocity_field, grid) == pytest.approx(plain)
    assert weighted_sobolev_norm(velocity_field, grid, 0.0) == pytest.approx(plain)
    assert weighted_sobolev_norm(velocity_field, grid, 1.0) >= plain
    assert weighted_l2_norm(velocity_field, grid, ell=1.0) >= plain


def test_weighted_l2_with_maxwellian_weight(grid):
    ones = np.ones(grid.size)

    value = weighted_l2_norm(ones, grid, mu_power=0.5)

    assert value == pytest.approx(grid.norm(maxwellian_power(grid, 0.5)))


def test_weak_strong_comparison_fields():
    comparison = WeakStrongComparison(strong=1.0, weak=1.5, error_estimate=0.6)

    assert comparison.difference == pytest.approx(0.5)
    assert comparison.relative_difference == pytest.approx(1.0 / 3.0)
    assert comparison.consistent
    assert comparison.to_dict()["consistent"] is True
    assert WeakStrongComparison(strong=0.0, weak=0.0, error_estimate=0.0).relative_difference == 0.0


def test_compare_weak_strong_uses_the_raw_operator(kernel, grid, rng):
    """Test that the strong value is (Q(f, g), h) without the moment projection."""
    mu = maxwellian(grid)
    g = mu * (1.0 + 0.1 * rng.uniform(size=grid.size))
    h = np.cos(grid.velocities[:, 0])
    op = operator_for(grid, kernel)

    comparison = compare_weak_strong(mu, g, h, kernel, grid)

    raw = grid.cell_volume * np.sum(op.collide(mu, g, conservative=False) * h)
    assert comparison.strong == pytest.approx(raw)
    assert np.isfinite(comparison.weak)
    assert 0.0 < comparison.error_estimate < math.inf


def test_compare_weak_strong_catches_a_wrong_gain(kernel, grid, rng):
    mu = maxwellian(grid)
    g = mu * (1.0 + 0.1 * rng.uniform(size=grid.size))
    h = np.cos(grid.velocities[:, 0])
    nearest = kernel.model_copy(update={"interpolation": "nearest"})

    comparison = compare_weak_strong(
        mu, g, h, kernel, grid, ShiftedGain(grid, kernel), ShiftedGain(grid, nearest)
    )

    assert not comparison.consistent
    assert comparison.relative_difference > 1.0
