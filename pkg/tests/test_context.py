"""Tests for the solver context and the nonlinear runner."""

import json

import numpy as np
import pytest

from boltzbesov.config import RuntimeConfig
from boltzbesov.errors import BudgetExceededError
from boltzbesov.kinetics.maxwellian import NORMALIZATION
from boltzbesov.solver.context import build_context
from boltzbesov.solver.ledger import min_distribution
from boltzbesov.solver.runner import ledger_for, new_ledger, run_nonlinear
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.utils.logging import RunLogger


def test_transport_context_has_no_operator(transport_config, runtime):
    context = build_context(transport_config, runtime)

    assert context.operator is None
    assert context.partition.q_max == 1
    assert context.positivity_tolerance() == pytest.approx(9.0 * NORMALIZATION / 8.0)
    assert set(context.header()) == {"seed", "kernel", "lattice", "velocity_grid"}
    assert context.header()["seed"] == 7


def test_collision_context(small_config, runtime):
    context = build_context(small_config, runtime)

    assert context.operator is not None
    assert context.form.shape == (64, 64)
    assert context.energy_params.delta3 < context.energy_params.delta2


def test_positivity_tolerance_uses_the_one_step_drift(small_config, runtime):
    """Test epsilon_pos = max(h^2 mu(0) / 8, 10 dt max |Q(mu, mu)|)."""
    context = build_context(small_config, runtime)
    mu = context.operator.mu
    drift = float(np.max(np.abs(context.operator.collide(mu, mu))))
    interpolation = 9.0 * NORMALIZATION / 8.0

    expected = max(interpolation, 10.0 * max(small_config.dt * drift, 1e-13 * NORMALIZATION))

    assert context.positivity_tolerance() == pytest.approx(expected)


def test_negative_distribution_is_flagged(small_config, runtime, lattice, grid):
    context = build_context(small_config, runtime)
    epsilon = context.positivity_tolerance()
    peak = float(np.max(context.operator.mu))
    depth = 1.0 + 2.0 * epsilon / peak
    g = SpectralField.from_physical(
        np.ones(lattice.shape)[..., None] * (-depth * context.operator.sqrt_mu), lattice, grid
    )

    ledger = new_ledger(context, g)
    ledger.record(0.0, g)

    assert min_distribution(g) < -epsilon
    assert any("min f" in flag for flag in ledger.flags)


def test_budget_is_checked(small_config):
    with pytest.raises(BudgetExceededError):
        build_context(small_config, RuntimeConfig(op_budget=10.0))


def test_random_streams(transport_config, runtime):
    """Test that streams are reproducible and independent."""
    context = build_context(transport_config, runtime)

    first = context.rng(1).standard_normal(4)

    np.testing.assert_array_equal(first, context.rng(1).standard_normal(4))
    assert not np.allclose(first, context.rng(2).standard_normal(4))
    np.testing.assert_array_equal(context.initial().coeffs, context.initial().coeffs)


def test_transport_run_conserves_energy(transport_config, runtime):
    """Test that free transport keeps every block norm, so E_t stays at ||g0||."""
    context = build_context(transport_config, runtime)

    traj, ledger = run_nonlinear(context)

    assert len(traj) == 3
    assert ledger.energy == pytest.approx(ledger.initial_size, rel=1e-10)
    assert ledger.flags == []
    assert len(ledger.rows) == 3


def test_collisional_run_writes_events(small_config, runtime, temp_dir):
    context = build_context(small_config, runtime)
    run_logger = RunLogger(temp_dir / "out", header=context.header())

    traj, ledger = run_nonlinear(context, run_logger=run_logger)

    events = [json.loads(line) for line in run_logger.events_path.read_text().splitlines()]
    kinds = [e["kind"] for e in events]
    assert kinds.count("step") == 3
    assert kinds[-1] == "ledger"
    assert ledger.min_f > -ledger.positivity_tolerance
    assert all(np.isfinite(g.coeffs).all() for g in traj.fields)


def test_ledger_for_existing_trajectory(transport_config, runtime):
    context = build_context(transport_config, runtime)
    traj, _ = run_nonlinear(context)

    ledger = ledger_for(traj, context, picard_ratios=[0.5])

    assert ledger.rows[0].picard_ratio == 0.5
    assert ledger.rows[1].picard_ratio is None
