"""Tests for the velocity-space inequality checks."""

import math
from dataclasses import replace

import numpy as np
import pytest

from boltzbesov.collision.kernel import CollisionKernel
from boltzbesov.collision.operators import CollisionOperator, LinearizedMatrices
from boltzbesov.verify.bounds import (
    check_coercivity,
    check_preset_coercivity,
    check_sandwich,
    check_upper_bounds,
    check_weak_strong,
    check_zero_identities,
    gamma_bounds,
)
from boltzbesov.verify.families import VerifyContext

from tests.conftest import SMALL_KERNEL, ShiftedGain

UPPER_IDS = [
    "gamma.amuxy",
    "gamma.weighted_zero",
    "gamma.another_type",
    "gamma.weighted_soft",
    "linear.l2_smallness",
    "triple.projection",
    "dissipation.bound",
]


class MomentumLeak(CollisionOperator):
    """Gain with a spurious term proportional to the partner's momentum."""

    def gain(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        momentum = np.asarray(f) @ (self.grid.velocities[:, 0] * self.grid.cell_volume)
        return super().gain(f, g) + 1e9 * np.asarray(momentum)[..., None] * np.asarray(g)


class ShiftedL1(CollisionOperator):
    """Linearization whose L1 is pushed far below zero."""

    def linear_matrices(self, closure: bool = True) -> LinearizedMatrices:
        mats = super().linear_matrices(closure)
        size = np.abs(mats.l1).sum(axis=0).max() + np.abs(mats.l1).sum(axis=1).max()
        shift = 2.0 * size + 1e6 * np.max(self.loss_matrix @ self.mu) + 1.0
        return replace(mats, l1=mats.l1 - shift * np.eye(self.grid.size))


def test_soft_kernel_gets_every_gamma_bound(vctx):
    assert sorted(gamma_bounds(vctx)) == sorted(UPPER_IDS[:4])


def test_hard_kernel_drops_the_soft_bounds():
    """Test that gamma + nu > 0 keeps only the unweighted bounds."""
    hard = VerifyContext(kernel=CollisionKernel(gamma=0.5, nu=0.5, **SMALL_KERNEL))

    assert sorted(gamma_bounds(hard)) == ["gamma.amuxy", "gamma.weighted_zero"]


def test_sandwich_ratios_are_scale_invariant(family, vctx):
    lower, upper = check_sandwich(family, vctx)

    assert (lower.id, upper.id) == ("sandwich.lower", "sandwich.upper")
    for report in (lower, upper):
        assert report.hard_failures == []
        assert len(report.measured) == family.count
        assert all(0.0 < r < math.inf for r in report.measured)
    assert len(upper.details["frequency_sweep"]) == family.grid.points // 2 - 1


def test_coercivity_on_zero_family(zero_family, vctx):
    """Test that zero samples are skipped and nothing is flagged negative."""
    report = check_coercivity(zero_family, vctx)

    assert report.mode == "min"
    assert report.skipped == zero_family.count
    assert report.hard_failures == []
    assert report.details["floor_tolerance"] > 0.0
    assert report.passed


def test_coercivity_on_real_samples(family, vctx):
    """Test that a non-positive lambda_0 is never reported as passing."""
    report = check_coercivity(family, vctx)

    assert len(report.measured) == family.count
    assert all(math.isfinite(r) for r in report.measured)
    if report.constant <= 0.0:
        assert not report.passed
        assert any("not positive" in m for m in report.hard_failures)


def test_coercivity_fails_for_a_negative_l1(family, vctx, grid, kernel):
    report = check_coercivity(family, vctx, ShiftedL1(grid, kernel))

    assert report.constant < 0.0
    assert not report.passed
    assert any("not positive" in m for m in report.hard_failures)
    assert any("beyond the floor" in m for m in report.hard_failures)


def test_preset_coercivity_covers_soft_and_hard(family, vctx):
    reports = check_preset_coercivity(family, vctx)

    assert [r.id for r in reports] == ["coercivity.lambda0.soft", "coercivity.lambda0.hard"]
    kernels = [r.header["kernel"] for r in reports]
    assert [(k["gamma"], k["nu"]) for k in kernels] == [(-0.5, 0.5), (0.25, 0.5)]
    assert all(k["theta_min"] == SMALL_KERNEL["theta_min"] for k in kernels)
    for report in reports:
        assert len(report.measured) == family.count
        if report.constant <= 0.0:
            assert not report.passed


def test_zero_identities_structure(family, vctx, operator):
    report = check_zero_identities(family, vctx)

    assert report.id == "collision.zero_identities"
    assert len(report.ratios) == family.count + 2
    assert set(report.details["epsilon_quad"]) == {"equilibrium", "moments", "kernel", "drift"}
    residuals = report.details["L(ker L)"]
    assert len(residuals) == 5
    assert residuals[0] == pytest.approx(operator.floor().kernel)


def test_zero_identities_skip_zero_samples(zero_family, vctx):
    report = check_zero_identities(zero_family, vctx)

    assert report.ratios[2:] == [None] * zero_family.count


def test_zero_identities_catch_a_momentum_leak(family, vctx, grid, kernel):
    """Test that a gain term which creates momentum fails on every sample."""
    report = check_zero_identities(family, vctx, MomentumLeak(grid, kernel))

    assert not report.passed
    for i in range(family.count):
        assert any(m.startswith(f"sample {i}:") for m in report.hard_failures)


def test_weak_strong_check_on_the_family(family, vctx):
    report = check_weak_strong(family, vctx)

    assert report.id == "collision.weak_strong"
    assert len(report.details["comparisons"]) == family.count
    assert all("relative_difference" in c for c in report.details["comparisons"])


def test_weak_strong_check_catches_a_wrong_gain(family, vctx, grid, kernel):
    nearest = kernel.model_copy(update={"interpolation": "nearest"})

    report = check_weak_strong(family, vctx, ShiftedGain(grid, kernel), ShiftedGain(grid, nearest))

    assert not report.passed
    assert len(report.hard_failures) == family.count


def test_upper_bounds_cover_every_inequality(family, vctx):
    reports = check_upper_bounds(family, vctx)

    assert [r.id for r in reports] == UPPER_IDS
    for report in reports:
        assert report.hard_failures == []
        assert len(report.ratios) == family.count


def test_upper_bounds_skip_zero_samples(zero_family, vctx):
    reports = check_upper_bounds(zero_family, vctx)

    assert all(r.constant == 0.0 for r in reports)
    assert all(r.passed for r in reports)
