"""Nonlinear runs with the running energy/dissipation ledger."""

import logging
from typing import Optional

from boltzbesov.solver.context import SolverContext
from boltzbesov.solver.ledger import NormLedger
from boltzbesov.solver.stepper import march
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.state import SolverState, Trajectory
from boltzbesov.utils.logging import RunLogger

logger = logging.getLogger(__name__)


def new_ledger(context: SolverContext, g0: SpectralField) -> NormLedger:
    return NormLedger(
        context.partition,
        context.form,
        g0,
        bound_ratio_limit=context.config.bound_ratio_limit,
        positivity_tolerance=context.positivity_tolerance(),
    )


def run_nonlinear(
    context: SolverContext,
    g0: Optional[SpectralField] = None,
    run_logger: Optional[RunLogger] = None,
    dt: Optional[float] = None,
) -> tuple[Trajectory, NormLedger]:
    """Integrate the perturbation equation to ``t_final`` while monitoring the ledger.

    Every step updates the running norms; a diverging bound ratio or a
    positivity violation is flagged and the run continues.

    Args:
        context: Solver context
        g0: Initial datum (default: built from the configured spec)
        run_logger: Optional run transcript
        dt: Time step (default: the configured one)

    Returns:
        Tuple of (thinned trajectory, ledger)

    Raises:
        NumericalAbort: Non-finite values in a substep
    """
    config = context.config
    dt = dt or config.dt
    g0 = context.initial() if g0 is None else g0
    ledger = new_ledger(context, g0)
    stepper = context.stepper()
    seen_flags = 0

    def on_step(state: SolverState) -> None:
        nonlocal seen_flags
        row = ledger.record(state.time, state.g)
        if run_logger is None:
            return
        if state.step_index % config.snapshot_every == 0:
            run_logger.log_event("step", **vars(row))
        for flag in ledger.flags[seen_flags:]:
            run_logger.log_event("warning", message=flag)
        seen_flags = len(ledger.flags)

    logger.info(
        f"nonlinear run: {config.steps} steps of dt={dt:g}, scheme={config.scheme}, "
        f"||g0|| = {ledger.initial_size:.3e}"
    )
    traj = march(stepper, g0, config.t_final, dt, config.snapshot_every, on_step)
    summary = ledger.summary()
    logger.info(
        f"E_T = {summary['E_T']:.3e}, D_T = {summary['D_T']:.3e}, "
        f"max ratio = {summary['max_ratio']:.3e}, min f = {summary['min_f']:.3e}"
    )
    if run_logger is not None:
        run_logger.log_event("ledger", **summary)
    return traj, ledger


def ledger_for(
    traj: Trajectory, context: SolverContext, picard_ratios: Optional[list[float]] = None
) -> NormLedger:
    """Ledger of an existing trajectory; row n carries the n-th Picard ratio when given."""
    traj.validate()
    ledger = new_ledger(context, traj.fields[0])
    ratios = picard_ratios or []
    for n, (t, g) in enumerate(zip(traj.times, traj.fields)):
        ledger.record(t, g, ratios[n] if n < len(ratios) else None)
    return ledger
