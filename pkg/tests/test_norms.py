"""Tests for Besov, Chemin-Lerner and time norms."""

import math

import numpy as np
import pytest

from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.spaces.norms import (
    INF,
    NormParams,
    besov_block_norms,
    besov_norm,
    chemin_lerner_norm,
    energy_norm,
    iterated_norm,
    lp_sum,
    sup_norm,
    time_norm,
    triple_chemin_lerner_norm,
    weighted_sum,
)
from boltzbesov.state import Trajectory


@pytest.mark.parametrize("name", ["p", "r", "alpha", "beta"])
def test_norm_params_reject_small_exponents(name):
    with pytest.raises(ArgumentError, match=name):
        NormParams(**{name: 0.5})


def test_constant_field_lives_in_lowest_block(lattice):
    """Test that only Delta_{-1} sees a constant."""
    f = SpectralField.from_physical(np.full(lattice.shape, 2.0), lattice)
    params = NormParams(s=1.5, p=2.0, r=1.0)

    blocks = besov_block_norms(f, params)

    assert blocks[-1] == pytest.approx(2.0 * math.sqrt(lattice.volume))
    assert blocks[0] == pytest.approx(0.0, abs=1e-14)
    assert besov_norm(f, params) == pytest.approx(2.0 * math.sqrt(lattice.volume) * 2**-1.5)


def test_homogeneous_norm_ignores_constants(lattice):
    f = SpectralField.from_physical(np.full(lattice.shape, 2.0), lattice)

    assert besov_norm(f, NormParams(homogeneous=True)) == pytest.approx(0.0, abs=1e-12)


def test_lp_sum_and_weighted_sum():
    assert lp_sum(np.array([3.0, -4.0]), 2.0) == pytest.approx(5.0)
    assert lp_sum(np.array([3.0, -4.0]), INF) == 4.0
    assert weighted_sum({0: 1.0, 1: 1.0}, 1.0, 1.0) == pytest.approx(3.0)
    assert weighted_sum({}, 1.0, 1.0) == 0.0


def test_time_norm():
    times = np.array([0.0, 1.0, 2.0])
    values = np.ones(3)

    assert time_norm(values, times, 2.0) == pytest.approx(math.sqrt(2.0))
    assert time_norm(np.array([1.0, -3.0, 2.0]), times, INF) == 3.0


def test_energy_norm_is_b32_norm(kinetic_field):
    expected = besov_norm(kinetic_field, NormParams(s=1.5, p=2.0, r=1.0, beta=2.0))

    assert energy_norm(kinetic_field) == pytest.approx(expected)


def test_non_parseval_exponent_agrees_for_p2(scalar_field):
    """Test that the physical-space x-norm path is consistent at p = 2."""
    parseval = besov_block_norms(scalar_field, NormParams(p=2.0))
    block = besov_block_norms(scalar_field, NormParams(p=INF))

    for q, value in parseval.items():
        assert block[q] >= value / math.sqrt(scalar_field.lattice.volume) - 1e-12


def test_sup_norm(scalar_field):
    assert sup_norm(scalar_field) == pytest.approx(1.8)


def _ramp(kinetic_field):
    return Trajectory([0.0, 0.5, 1.0], [kinetic_field * c for c in (1.0, 1.5, 2.0)])


def test_chemin_lerner_on_constant_trajectory(kinetic_field):
    params = NormParams(alpha=INF)
    traj = Trajectory.constant(kinetic_field, [0.0, 1.0])

    assert chemin_lerner_norm(traj, params) == pytest.approx(besov_norm(kinetic_field, params))


def test_iterated_norm_below_chemin_lerner(kinetic_field):
    """Test Minkowski: L^inf_T(B) is dominated by the Chemin-Lerner norm."""
    traj = _ramp(kinetic_field)
    params = NormParams(s=1.5, r=1.0, alpha=INF)

    assert iterated_norm(traj, params) <= chemin_lerner_norm(traj, params) * (1 + 1e-12)


def test_iterated_norm_with_finite_alpha(kinetic_field):
    traj = _ramp(kinetic_field)

    assert iterated_norm(traj, NormParams(alpha=2.0)) > 0.0


def test_trajectory_norm_errors(kinetic_field):
    with pytest.raises(ArgumentError, match="empty"):
        chemin_lerner_norm(Trajectory(), NormParams())
    with pytest.raises(ArgumentError, match="at least 2"):
        chemin_lerner_norm(Trajectory([0.0], [kinetic_field]), NormParams(alpha=1.0))


def test_triple_norm_with_identity_form_is_chemin_lerner(kinetic_field, grid):
    """Test that form = |cell| I reduces the triple norm to the L^2_v L^2_x block norm."""
    traj = _ramp(kinetic_field)
    form = grid.cell_volume * np.eye(grid.size)
    params = NormParams(s=1.5, p=2.0, r=1.0, alpha=INF, beta=2.0)

    triple = triple_chemin_lerner_norm(traj, form, s=1.5, p=INF, r=2.0)

    assert triple == pytest.approx(chemin_lerner_norm(traj, params), rel=1e-12)


def test_triple_norm_needs_kinetic_field(scalar_field):
    traj = Trajectory([0.0], [scalar_field])

    with pytest.raises(ArgumentError, match="kinetic"):
        triple_chemin_lerner_norm(traj, np.eye(1), p=INF)


def test_trajectory_append_and_interpolate(kinetic_field):
    traj = Trajectory()
    traj.append(0.0, kinetic_field * 0.0)
    traj.append(1.0, kinetic_field)

    with pytest.raises(ArgumentError, match="does not increase"):
        traj.append(1.0, kinetic_field)

    middle = traj.at(0.25)

    np.testing.assert_allclose(middle.coeffs, 0.25 * kinetic_field.coeffs)
    assert traj.at(5.0) is traj.fields[-1]
    assert traj.horizon == 1.0


def test_trajectory_thinned_keeps_last(kinetic_field):
    traj = Trajectory.constant(kinetic_field, [0.0, 1.0, 2.0, 3.0, 4.0])

    thin = traj.thinned(3)

    assert thin.times == [0.0, 3.0, 4.0]
    assert traj.metadata()["snapshots"] == 5
