"""Tests for the fluid-type residual diagnostics."""

import pytest

from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.fluid import EQUATIONS, fluid_residual
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.state import Trajectory


def test_needs_three_snapshots(operator, kinetic_field):
    traj = Trajectory([0.0, 0.1], [kinetic_field, kinetic_field])

    with pytest.raises(ArgumentError, match="3 snapshots"):
        fluid_residual(traj, operator)


def test_zero_trajectory_has_zero_residuals(operator, lattice, grid):
    zero = SpectralField.zeros(lattice, grid)
    traj = Trajectory.constant(zero, [0.0, 0.1, 0.2, 0.3])

    report = fluid_residual(traj, operator)

    assert report.times == [0.1, 0.2]
    assert set(report.summary()) == set(EQUATIONS)
    assert all(value == 0.0 for value in report.summary().values())
    assert report.to_dict()["max"]["mass"] == 0.0


def test_residuals_are_finite(operator, kinetic_field):
    traj = Trajectory([0.0, 0.1, 0.2], [kinetic_field * c for c in (1.0, 0.9, 0.8)])

    report = fluid_residual(traj, operator, include_nonlinear=False)

    assert len(report.residuals["a"]) == 1
    assert report.max_residual("energy") >= 0.0


def test_scalar_snapshots_rejected(operator, scalar_field):
    traj = Trajectory.constant(scalar_field, [0.0, 0.1, 0.2])

    with pytest.raises(ArgumentError, match="kinetic"):
        fluid_residual(traj, operator)
