"""Named groups of checks, run at every configured refinement."""

import logging
from collections.abc import Callable
from typing import Optional

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.config import RuntimeConfig, SimulationConfig
from boltzbesov.constants import (
    LATTICE_CHECK_VELOCITY_POINTS,
    SUITES,
    WEAK_STRONG_VELOCITY_POINTS,
)
from boltzbesov.errors import ConfigurationError
from boltzbesov.solver.context import build_context
from boltzbesov.solver.runner import run_nonlinear
from boltzbesov.spaces.lattice import FrequencyLattice
from boltzbesov.utils.logging import RunLogger
from boltzbesov.verify.bounds import (
    check_energy_functional,
    check_moment_bounds,
    check_preset_coercivity,
    check_weak_strong,
    collision_checks,
)
from boltzbesov.verify.embeddings import embedding_checks
from boltzbesov.verify.families import FieldFamily, VerifyContext
from boltzbesov.verify.macro import check_macro_dissipation, check_nonlinear_energy
from boltzbesov.verify.report import ConstantReport, merge_refinements, sample_ratio
from boltzbesov.verify.trilinear import check_t_estimate, check_trilinear_variants

logger = logging.getLogger(__name__)

Check = Callable[[FieldFamily, VerifyContext], list[ConstantReport]]


def _lattice(config: SimulationConfig, points: Optional[int] = None) -> FrequencyLattice:
    return FrequencyLattice(config.lattice.half_length, points or config.lattice.points)


def _grid(config: SimulationConfig, points: Optional[int] = None) -> VelocityGrid:
    return VelocityGrid(config.velocity.half_width, points or config.velocity.points)


def refined(
    check: Check, base: FieldFamily, vctx: VerifyContext, lattice_points: list[int]
) -> list[ConstantReport]:
    """Run ``check`` at each lattice size and fold the constants into refinement tables."""
    if not lattice_points:
        return check(base, vctx)
    runs = [
        check(base.with_grids(lattice=FrequencyLattice(base.lattice.half_length, n)), vctx)
        for n in lattice_points
    ]
    return merge_refinements(runs, [f"N_x={n}" for n in lattice_points])


def refined_velocity(
    check: Check, base: FieldFamily, vctx: VerifyContext, velocity_points: list[int]
) -> list[ConstantReport]:
    """Run ``check`` at each velocity grid size and fold the constants together."""
    if not velocity_points:
        return check(base, vctx)
    runs = [
        check(base.with_grids(grid=VelocityGrid(base.grid.half_width, n)), vctx)
        for n in velocity_points
    ]
    return merge_refinements(runs, [f"N_v={n}" for n in velocity_points])


def core_suite(
    config: SimulationConfig, runtime: RuntimeConfig, vctx: VerifyContext
) -> list[ConstantReport]:
    """Littlewood-Paley embeddings, block bounds and the energy functional bounds."""
    spec = config.family
    coarse = FieldFamily.from_spec(
        spec, _lattice(config), _grid(config, LATTICE_CHECK_VELOCITY_POINTS), runtime.seed
    )
    family = FieldFamily.from_spec(spec, _lattice(config), _grid(config), runtime.seed)
    return [
        *refined(embedding_checks, coarse, vctx, spec.lattice_refinements),
        check_energy_functional(family, vctx),
        check_moment_bounds(family, vctx),
    ]


def collision_suite(
    config: SimulationConfig, runtime: RuntimeConfig, vctx: VerifyContext
) -> list[ConstantReport]:
    """Zero identities, sandwich, coercivity, upper bounds and the weak-form oracle.

    Coercivity is also fitted at both default (gamma, nu) sets.
    """
    spec = config.family
    family = FieldFamily.from_spec(spec, _lattice(config), _grid(config), runtime.seed)
    reports = refined_velocity(collision_checks, family, vctx, spec.refinements)
    reports.extend(refined_velocity(check_preset_coercivity, family, vctx, spec.refinements))
    oracle_family = family.with_grids(grid=_grid(config, WEAK_STRONG_VELOCITY_POINTS))
    reports.append(check_weak_strong(oracle_family, vctx))
    return reports


def _trilinear_checks(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    return [*check_trilinear_variants(family, vctx), check_t_estimate(family, vctx)]


def run_reports(
    config: SimulationConfig, runtime: RuntimeConfig, dt: float
) -> list[ConstantReport]:
    """Solver-trajectory checks for one time step."""
    context = build_context(config, runtime)
    traj, ledger = run_nonlinear(context, dt=dt)
    header = context.header()

    def report(id: str, description: str, **kwargs: object) -> ConstantReport:
        return ConstantReport(
            id=id,
            description=description,
            header=header,
            stability_factor=runtime.stability_factor,
            **kwargs,  # type: ignore[arg-type]
        )

    bound = report("solver.ledger_ratio", "(E_T + D_T) against ||g0||")
    bound.add(sample_ratio(ledger.energy + ledger.dissipation, ledger.initial_size))

    positivity = report(
        "solver.positivity", "max(-min f, 0) against epsilon_pos", track_stability=False
    )
    deficit = max(-ledger.min_f, 0.0)
    positivity.add(sample_ratio(deficit, ledger.positivity_tolerance))
    positivity.details["min_f"] = ledger.min_f
    positivity.details["epsilon_pos"] = ledger.positivity_tolerance
    if deficit > ledger.positivity_tolerance:
        positivity.fail(f"min f = {ledger.min_f:.3e} below -{ledger.positivity_tolerance:.3e}")

    return [
        bound,
        positivity,
        *check_macro_dissipation(traj, context, ledger),
        check_nonlinear_energy(traj, context, ledger),
    ]


def solver_suite(
    config: SimulationConfig, runtime: RuntimeConfig, vctx: VerifyContext
) -> list[ConstantReport]:
    """Trilinear estimates on synthetic trajectories, then checks on real runs at dt and dt/2."""
    spec = config.family
    family = FieldFamily.from_spec(spec, _lattice(config), _grid(config), runtime.seed)
    reports = refined(_trilinear_checks, family, vctx, spec.lattice_refinements)

    halved = config.model_copy(update={"dt": config.dt / 2})
    runs = [run_reports(config, runtime, config.dt), run_reports(halved, runtime, halved.dt)]
    reports.extend(merge_refinements(runs, [f"dt={config.dt:g}", f"dt={halved.dt:g}"]))
    return reports


SUITE_RUNNERS: dict[
    str, Callable[[SimulationConfig, RuntimeConfig, VerifyContext], list[ConstantReport]]
] = {
    "core": core_suite,
    "collision": collision_suite,
    "solver": solver_suite,
}


def run_suite(
    name: str,
    config: SimulationConfig,
    runtime: Optional[RuntimeConfig] = None,
    run_logger: Optional[RunLogger] = None,
) -> list[ConstantReport]:
    """Run a named suite (``full`` runs the other three in order).

    Raises:
        ConfigurationError: Unknown suite name
    """
    if name not in SUITES:
        raise ConfigurationError(f"unknown suite '{name}', choose one of {', '.join(SUITES)}")
    runtime = runtime or RuntimeConfig()
    vctx = VerifyContext.from_config(config, runtime)
    names = [n for n in SUITES if n != "full"] if name == "full" else [name]

    reports: list[ConstantReport] = []
    for suite in names:
        logger.info(f"running suite '{suite}'")
        batch = SUITE_RUNNERS[suite](config, runtime, vctx)
        for r in batch:
            status = "pass" if r.passed else "FAIL"
            logger.info(
                f"{r.id}: constant {r.constant:.4e}, stability {r.stability:.3f} [{status}]"
            )
            if run_logger is not None:
                run_logger.log_event(
                    "report",
                    suite=suite,
                    id=r.id,
                    constant=r.constant,
                    stability=r.stability,
                    passed=r.passed,
                )
        reports.extend(batch)
    return reports
