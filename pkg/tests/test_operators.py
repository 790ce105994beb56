"""Tests for the strong-form collision operators."""

import numpy as np
import pytest

from boltzbesov.collision.fields import apply_matrix, gamma_field, l1_field, linear_field
from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.operators import (
    FLOOR_NAMES,
    CollisionOperator,
    collide_Q,
    gamma_op,
    linearized_L,
    operator_for,
)
from boltzbesov.errors import ArgumentError, BudgetExceededError
from boltzbesov.kinetics.maxwellian import kernel_basis


@pytest.fixture
def perturbation(operator, rng):
    """Positive distribution close to mu and a second smooth one."""
    f = operator.mu * (1.0 + 0.2 * rng.standard_normal(operator.grid.size))
    g = operator.mu * (1.0 + 0.1 * rng.uniform(size=operator.grid.size))
    return f, g


def test_counts(operator):
    """Test the configuration and operation counts on N_v = 4 with six sigma nodes."""
    assert operator.quadrature.size == 6
    assert operator.n_configurations == 64 * 63 * 6
    assert operator.operation_count == 64 * 64 * 6
    assert operator.describe()["configurations"] == 24192


def test_budget(grid, kernel):
    op = CollisionOperator(grid, kernel, op_budget=100.0)

    with pytest.raises(BudgetExceededError, match="budget"):
        op.check_budget()
    with pytest.raises(BudgetExceededError):
        op.collide(op.mu, op.mu)


def test_conservative_collision_has_no_moments(operator, perturbation):
    """Test discrete mass, momentum and energy conservation."""
    f, g = perturbation

    q = operator.collide(f, g)
    moments = operator.moment_matrix @ q
    scale = np.abs(operator.moment_matrix) @ np.abs(q)

    assert np.all(np.abs(moments) <= 1e-10 * scale + 1e-300)


def test_collide_is_bilinear_and_batched(operator, perturbation):
    f, g = perturbation

    single = operator.collide(f, g)
    batch = operator.collide(np.stack([f, 2.0 * f]), g)

    np.testing.assert_allclose(batch[0], single, rtol=1e-12, atol=1e-18)
    np.testing.assert_allclose(batch[1], 2.0 * single, rtol=1e-12, atol=1e-18)


def test_chunking_and_threads_do_not_change_results(grid, kernel, operator, perturbation):
    f, g = perturbation
    chunked = CollisionOperator(grid, kernel, threads=2, chunk_elements=1000)

    assert len(chunked.row_slices()) > 1
    np.testing.assert_allclose(
        chunked.collide(f, g), operator.collide(f, g), rtol=1e-10, atol=1e-16
    )


def test_linear_matrices_match_gamma(operator, rng):
    """Test L1 g = -Gamma(mu^1/2, g) and L2_raw g = -Gamma(g, mu^1/2)."""
    g = rng.standard_normal(operator.grid.size) * operator.sqrt_mu
    mats = operator.linear_matrices()

    expected_l1 = -operator.gamma(operator.sqrt_mu, g)
    expected_l2 = -operator.gamma(g, operator.sqrt_mu)

    np.testing.assert_allclose(mats.l1 @ g, expected_l1, atol=1e-9 * np.abs(expected_l1).max())
    np.testing.assert_allclose(
        mats.l2_raw @ g, expected_l2, atol=1e-9 * np.abs(expected_l2).max()
    )


def test_closure_annihilates_kernel(operator):
    """Test that L1 + L2 vanishes on span{1, v, |v|^2} mu^1/2."""
    basis = kernel_basis(operator.grid)
    full = operator.linear_matrices(closure=True).full

    residual = np.abs(full @ basis.T).max()

    assert residual <= 1e-8 * np.abs(full).max() * np.abs(basis).max()


def test_projector_is_orthogonal(operator):
    p = operator.kernel_projector

    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(p, p.T, atol=1e-12)
    assert np.trace(p) == pytest.approx(5.0)


def test_linearized_returns_both_parts(operator, rng):
    g = rng.standard_normal((3, operator.grid.size))
    mats = operator.linear_matrices()

    l1g, l2g = operator.linearized(g)

    np.testing.assert_allclose(l1g, g @ mats.l1.T)
    np.testing.assert_allclose(l2g, g @ mats.l2.T)


def test_floor(operator):
    floor = operator.floor()
    values = floor.to_dict()

    assert set(values) == {"floor", "epsilon_quad"}
    assert set(values["floor"]) == set(FLOOR_NAMES)
    for name in FLOOR_NAMES:
        assert getattr(floor, name) >= 0.0
        assert floor.tolerance(name) == pytest.approx(10.0 * max(getattr(floor, name), 1e-13))
    assert floor.kernel == pytest.approx(operator.kernel_residuals()[0])
    mu = operator.mu
    assert floor.drift == pytest.approx(float(np.max(np.abs(operator.collide(mu, mu)))))
    assert operator.floor() is floor


def test_closure_removes_the_kernel_residuals(operator):
    raw = operator.kernel_residuals()
    closed = operator.kernel_residuals(closure=True)

    assert raw.shape == closed.shape == (5,)
    assert np.all(closed <= 1e-10)


def test_relative_moments(operator, rng):
    mu = operator.mu
    g = rng.standard_normal(operator.grid.size) * mu

    assert operator.relative_moments(mu, mu) == pytest.approx(1.0)
    assert operator.relative_moments(operator.project(g), g) <= 1e-10
    assert operator.relative_moments(np.zeros_like(mu), np.zeros_like(mu)) == 0.0


def test_collide_is_gain_minus_loss(operator, perturbation):
    f, g = perturbation

    raw = operator.collide(f, g, conservative=False)

    np.testing.assert_allclose(raw, operator.gain(f, g) - operator.loss(f, g), atol=1e-14)


def test_wrong_velocity_size(operator):
    with pytest.raises(ArgumentError, match="grid has 64"):
        operator.collide(np.ones(5), np.ones(5))


def test_module_functions_use_shared_operator(grid, kernel, perturbation):
    f, g = perturbation
    op = operator_for(grid, kernel)

    assert operator_for(grid, kernel) is op
    np.testing.assert_allclose(collide_Q(f, g, kernel, grid), op.collide(f, g))
    np.testing.assert_allclose(
        gamma_op(op.sqrt_mu, op.sqrt_mu, kernel, grid), op.gamma(op.sqrt_mu, op.sqrt_mu)
    )
    l1g, _ = linearized_L(op.sqrt_mu, kernel, grid)
    np.testing.assert_allclose(l1g, op.linear_matrices().l1 @ op.sqrt_mu)


def test_field_operators_act_pointwise(operator, kinetic_field):
    """Test that the x-field wrappers agree with the velocity operators per point."""
    values = kinetic_field.to_physical()
    mats = operator.linear_matrices()

    cases = [
        (linear_field(operator, kinetic_field), values @ mats.full.T),
        (l1_field(operator, kinetic_field), values @ mats.l1.T),
        (gamma_field(operator, kinetic_field), operator.gamma(values, values)),
    ]
    for field, expected in cases:
        scale = np.abs(expected).max()
        np.testing.assert_allclose(field.to_physical(), expected, atol=1e-10 * scale)
    assert apply_matrix(np.eye(64), kinetic_field).coeffs.shape == kinetic_field.coeffs.shape


def test_field_operators_check_grid(kernel, kinetic_field):
    other = operator_for(VelocityGrid(half_width=8.0, points=4), kernel)

    with pytest.raises(ArgumentError, match="velocity grids"):
        linear_field(other, kinetic_field)
