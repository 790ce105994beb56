"""Tests for seeded field families and the harness context."""

import numpy as np
import pytest

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.config import RuntimeConfig
from boltzbesov.verify.families import FieldFamily, VerifyContext


def test_samples_do_not_depend_on_count(family):
    """Test that sample i is the same whatever the family size."""
    bigger = FieldFamily(seed=3, count=5, lattice=family.lattice, grid=family.grid)

    np.testing.assert_array_equal(
        family.kinetic_sample(1).coeffs, bigger.kinetic_sample(1).coeffs
    )
    np.testing.assert_array_equal(family.velocity_sample(0, 2), bigger.velocity_sample(0, 2))


def test_roles_draw_different_samples(family):
    a, b, _ = family.velocity_triple(0)

    assert not np.allclose(a, b)


def test_sample_norms_match_amplitude(family):
    assert family.kinetic_sample(0).l2_norm() == pytest.approx(1.0, rel=1e-12)
    assert family.scalar_sample(0).l2_norm() == pytest.approx(1.0, rel=1e-12)
    assert family.grid.norm(family.velocity_sample(0)) == pytest.approx(1.0, rel=1e-12)


def test_samples_are_real(family):
    assert family.kinetic_sample(0).is_hermitian()
    assert family.scalar_sample(1).is_hermitian()


def test_zero_family(zero_family):
    assert zero_family.is_zero
    assert not np.any(zero_family.kinetic_sample(0).coeffs)
    assert not np.any(zero_family.scalar_sample(0).coeffs)
    assert not np.any(zero_family.velocity_sample(0))


def test_trajectory_is_damped_transport(family):
    traj = family.trajectory(0)

    assert traj.times == pytest.approx([0.0, 0.05, 0.1])
    norms = [g.l2_norm() for g in traj.fields]
    np.testing.assert_allclose(norms, np.exp(-np.array(traj.times)), rtol=1e-12)


def test_with_grids_keeps_seed(family):
    finer = family.with_grids(grid=VelocityGrid(half_width=6.0, points=8))

    assert finer.seed == family.seed
    assert finer.grid.points == 8
    assert finer.lattice == family.lattice
    assert finer.describe()["velocity_points"] == 8


def test_verify_context_report_header(vctx, family):
    report = vctx.report("x.y", "check", family, mode="min")

    assert report.mode == "min"
    assert report.header["family"]["seed"] == 3
    assert report.stability_factor == vctx.stability_factor


def test_verify_context_from_config(small_config):
    runtime = RuntimeConfig(threads=2, stability_factor=5.0)

    ctx = VerifyContext.from_config(small_config, runtime)

    assert ctx.threads == 2
    assert ctx.stability_factor == 5.0
    assert ctx.delta3 == small_config.delta3
    assert ctx.form(VelocityGrid(half_width=6.0, points=4)).matrix.shape == (64, 64)
