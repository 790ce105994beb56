"""Tests for the collision kernel and the sigma quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.integrate import quad

from boltzbesov.collision.kernel import (
    CollisionKernel,
    eval_b,
    kernel_from_potential,
    panel_edges,
    sigma_quadrature,
)
from boltzbesov.errors import ConfigurationError, DomainError


def test_eval_b_power_law():
    kernel = CollisionKernel(nu=0.5, K=2.0)

    assert eval_b(1.0, kernel) == pytest.approx(2.0)
    assert isinstance(eval_b(0.5, kernel), float)
    np.testing.assert_allclose(eval_b(np.array([1.0, 0.25]), kernel), [2.0, 2.0 * 4**2.5])


@given(
    st.floats(min_value=1e-4, max_value=math.pi / 2),
    st.floats(min_value=0.1, max_value=1.9),
)
def test_eval_b_scaling(theta, nu):
    """Test that halving theta multiplies b by 2^(2 + nu)."""
    kernel = CollisionKernel(gamma=0.0, nu=nu)

    ratio = eval_b(theta / 2, kernel) / eval_b(theta, kernel)

    assert ratio == pytest.approx(2.0 ** (2.0 + nu), rel=1e-10)


@pytest.mark.parametrize("theta", [0.0, -0.1, 2.0])
def test_eval_b_domain(theta, kernel):
    with pytest.raises(DomainError):
        eval_b(theta, kernel)


def test_kernel_regime_validation():
    """Test gamma > max(-3, -3/2 - nu)."""
    CollisionKernel(gamma=-1.9, nu=0.5)
    with pytest.raises(ValidationError, match="gamma"):
        CollisionKernel(gamma=-2.0, nu=0.5)
    with pytest.raises(ValidationError, match="gamma"):
        CollisionKernel(gamma=-3.0, nu=1.8)


def test_kernel_rejects_odd_psi_and_bad_scheme():
    with pytest.raises(ValidationError, match="n_psi"):
        CollisionKernel(n_psi=3)
    with pytest.raises(ValidationError, match="interpolation"):
        CollisionKernel(interpolation="cubic")
    with pytest.raises(ValidationError):
        CollisionKernel(nu=2.0)


def test_presets():
    soft = CollisionKernel.preset("soft")
    hard = CollisionKernel.preset("hard", n_psi=4)

    assert not soft.hard_potential
    assert hard.hard_potential
    assert hard.n_psi == 4
    assert soft.extrapolation_order == pytest.approx(1.5)
    assert "angular_model" in soft.describe()
    with pytest.raises(ConfigurationError, match="medium"):
        CollisionKernel.preset("medium")


def test_kernel_is_hashable_and_frozen(kernel):
    assert hash(kernel) == hash(CollisionKernel(theta_min=0.5, n_theta=1, n_psi=2))
    with pytest.raises(ValidationError):
        kernel.nu = 1.0


def test_kernel_from_potential():
    """Test the inverse-power-law exponents."""
    kernel = kernel_from_potential(5.0)

    assert kernel.gamma == pytest.approx(0.0)
    assert kernel.nu == pytest.approx(0.5)
    with pytest.raises(DomainError):
        kernel_from_potential(2.0)


def test_panel_edges():
    edges = panel_edges(0.5)

    np.testing.assert_allclose(edges, [0.5, 1.0, math.pi / 2])
    assert panel_edges(0.05)[-1] == pytest.approx(math.pi / 2)


def test_quadrature_integrates_the_angular_weight():
    """Test the truncated sigma integral against adaptive quadrature."""
    kernel = CollisionKernel(theta_min=0.05)
    rule = sigma_quadrature(kernel, extrapolate=False)

    exact, _ = quad(lambda t: eval_b(t, kernel) * math.sin(t), kernel.theta_min, math.pi / 2)

    assert rule.weights.sum() == pytest.approx(2.0 * math.pi * exact, rel=1e-3)
    assert not np.any(rule.panel < 0)


def test_richardson_panel(kernel):
    plain = sigma_quadrature(kernel, extrapolate=False)
    rule = sigma_quadrature(kernel, extrapolate=True)

    assert rule.extrapolated
    assert np.count_nonzero(rule.panel == -1) == kernel.n_theta
    assert rule.size == plain.size + kernel.n_theta * kernel.n_psi
    assert rule.flat_panel.size == rule.size
    assert rule.weights.sum() > plain.weights.sum()
