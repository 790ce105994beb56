"""Linear Cauchy solves, Picard iteration and the empirical small-data threshold."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from boltzbesov.collision.fields import gamma_field, linear_field
from boltzbesov.constants import CONTRACTION_PATIENCE
from boltzbesov.errors import ArgumentError, ContractionError, NumericalAbort
from boltzbesov.solver.context import SolverContext
from boltzbesov.solver.initial import initial_datum
from boltzbesov.solver.ledger import ContractionReport
from boltzbesov.solver.stepper import linear_source, march
from boltzbesov.solver.transport import transport_term
from boltzbesov.spaces.lattice import SpectralField, check_compatible
from boltzbesov.spaces.norms import (
    NormParams,
    chemin_lerner_norm,
    energy_norm,
    triple_chemin_lerner_norm,
)
from boltzbesov.state import Trajectory

logger = logging.getLogger(__name__)

# L~^inf_T L~^2_v(B^{3/2}_{2,1})
ENERGY_NORM = NormParams(s=1.5, p=2.0, r=1.0, alpha=math.inf, beta=2.0)

Forcing = Union[SpectralField, Trajectory]


@dataclass
class CauchyReport:
    """Measured constant of the linear energy inequality.

    ``constant`` is (energy + dissipation) / (initial_size + sqrt(T) forcing_size),
    with 0/0 reported as 0.
    """

    energy: float
    dissipation: float
    initial_size: float
    forcing_size: float
    horizon: float

    @property
    def constant(self) -> float:
        rhs = self.initial_size + math.sqrt(self.horizon) * self.forcing_size
        lhs = self.energy + self.dissipation
        if rhs == 0.0:
            return 0.0 if lhs == 0.0 else math.inf
        return lhs / rhs

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "dissipation": self.dissipation,
            "initial_size": self.initial_size,
            "forcing_size": self.forcing_size,
            "horizon": self.horizon,
            "C0": self.constant,
        }


def _forcing_trajectory(forcing: Forcing, horizon: float) -> Trajectory:
    if isinstance(forcing, Trajectory):
        forcing.validate()
        return forcing
    return Trajectory.constant(forcing, [0.0, horizon])


def _linear_solve(
    forcing: Trajectory, g0: SpectralField, horizon: float, context: SolverContext, dt: float
) -> Trajectory:
    source = None
    if context.operator is not None:
        source = linear_source(
            context.operator, forcing.at, context.config.include_nonlinear, context.threads
        )
    stepper = context.stepper(source)
    return march(stepper, g0, horizon, dt)


def solve_linear_cauchy(
    forcing: Forcing,
    g0: SpectralField,
    horizon: float,
    context: SolverContext,
    dt: Optional[float] = None,
) -> tuple[Trajectory, CauchyReport]:
    """Solve d_t g + v.grad_x g + L1 g = Gamma(f, g) - L2 f on [0, T].

    Args:
        forcing: Frozen trajectory f(t) or a field held constant in time
        g0: Initial datum
        horizon: Final time T
        context: Solver context
        dt: Time step (default: the configured one)

    Returns:
        Tuple of (trajectory, report with the measured C0)

    Raises:
        NumericalAbort: Blow-up in a substep
        ConvergenceError: Semi-implicit inner iteration did not converge
    """
    dt = dt or context.config.dt
    f = _forcing_trajectory(forcing, horizon)
    check_compatible(f.fields[0], g0)
    traj = _linear_solve(f, g0, horizon, context, dt)
    report = CauchyReport(
        energy=chemin_lerner_norm(traj, ENERGY_NORM, context.partition),
        dissipation=triple_chemin_lerner_norm(
            traj, context.form, s=1.5, p=2.0, r=2.0, partition=context.partition
        ),
        initial_size=energy_norm(g0, context.partition),
        forcing_size=chemin_lerner_norm(f, ENERGY_NORM, context.partition),
        horizon=horizon,
    )
    logger.info(f"linear Cauchy solve T={horizon:g}: C0 = {report.constant:.3e}")
    return traj, report


def trajectory_difference(a: Trajectory, b: Trajectory) -> Trajectory:
    """Snapshot-wise a - b of two trajectories on the same times."""
    if len(a) != len(b) or not np.allclose(a.times, b.times, rtol=1e-12, atol=1e-12):
        raise ArgumentError("trajectories are sampled at different times")
    return Trajectory(list(a.times), [x - y for x, y in zip(a.fields, b.fields)])


def picard_iterate(
    g0: SpectralField,
    horizon: float,
    context: SolverContext,
    dt: Optional[float] = None,
) -> tuple[Trajectory, ContractionReport]:
    """Picard iteration g^{n+1} = S(g^n) starting from g^0 = 0.

    Each iterate solves the linear Cauchy problem with f = g^n. Iteration stops
    once ||g^{n+1} - g^n||_{L~^inf_T L~^2_v(B^{3/2})} drops below
    ``picard_tol`` or after ``picard_max_iter`` solves.

    Returns:
        Tuple of (last iterate, contraction report)

    Raises:
        ContractionError: Ratio >= 1 for three consecutive iterations
    """
    config = context.config
    dt = dt or config.dt
    size = energy_norm(g0, context.partition)
    threshold = config.small_data_threshold
    if threshold is not None and size > threshold:
        logger.warning(
            f"initial size {size:.3e} is above the small-data threshold {threshold:.3e}"
        )

    zero = g0 * 0.0
    steps = max(1, int(round(horizon / dt)))
    current = Trajectory.constant(zero, [n * dt for n in range(steps + 1)])
    report = ContractionReport()
    for n in range(config.picard_max_iter):
        nxt = _linear_solve(current, g0, horizon, context, dt)
        diff = chemin_lerner_norm(
            trajectory_difference(nxt, current), ENERGY_NORM, context.partition
        )
        if report.differences:
            previous = report.differences[-1]
            report.ratios.append(diff / previous if previous > 0 else 0.0)
        report.differences.append(diff)
        current = nxt
        logger.debug(f"picard iterate {n + 1}: ||w|| = {diff:.3e}")
        if diff < config.picard_tol:
            report.converged = True
            break
        recent = report.ratios[-CONTRACTION_PATIENCE:]
        if len(recent) == CONTRACTION_PATIENCE and all(r >= 1.0 for r in recent):
            raise ContractionError(
                f"Picard iteration stopped contracting after {report.iterations} iterates "
                f"(ratios {', '.join(f'{r:.3f}' for r in recent)}); "
                "the data may be too large or T too long",
                report=report,
            )
    if not report.converged:
        logger.warning(
            f"Picard iteration reached {report.iterations} iterates without meeting "
            f"tol {config.picard_tol:.1e}"
        )
    return current, report


def evolution_residual(traj: Trajectory, context: SolverContext) -> float:
    """max over interior snapshots of ||d_t g + v.grad_x g + L g - Gamma(g, g)||_{L^2}.

    d_t g is the centered difference over neighbouring snapshots.
    """
    traj.validate(3)
    if context.operator is None:
        raise ArgumentError("the evolution residual needs a collision operator")
    op = context.operator
    worst = 0.0
    for n in range(1, len(traj) - 1):
        g = traj.fields[n]
        span = traj.times[n + 1] - traj.times[n - 1]
        rate = (traj.fields[n + 1] - traj.fields[n - 1]) * (1.0 / span)
        residual = rate - transport_term(g) + linear_field(op, g)
        if context.config.include_nonlinear:
            residual = residual - gamma_field(op, g, workers=context.threads)
        worst = max(worst, residual.l2_norm())
    return worst


@dataclass
class ThresholdReport:
    """Bisection history of the small-data threshold."""

    threshold: float
    trials: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"threshold": self.threshold, "trials": self.trials}


def _contracts(
    profile: SpectralField, amplitude: float, horizon: float, context: SolverContext
) -> tuple[bool, Optional[ContractionReport]]:
    g0 = profile * amplitude
    try:
        _, report = picard_iterate(g0, horizon, context)
    except (ContractionError, NumericalAbort) as e:
        logger.debug(f"amplitude {amplitude:.3e} rejected: {e}")
        return False, None
    contracted = all(r < 1.0 for r in report.ratios)
    return contracted, report


def small_data_threshold(
    context: SolverContext,
    horizon: float,
    upper: float = 1.0,
    bisections: int = 6,
    profile: Optional[SpectralField] = None,
) -> ThresholdReport:
    """Largest tested amplitude of ||g0||_{L~^2_v(B^{3/2})} for which Picard contracts.

    The amplitude is halved from ``upper`` until the iteration contracts and
    then bisected between the last failure and the first success.
    """
    if profile is None:
        spec = context.config.initial.model_copy(update={"amplitude": 1.0})
        if spec.kind == "zero":
            raise ArgumentError("the threshold search needs a nonzero initial profile")
        profile = initial_datum(
            spec, context.lattice, context.grid, context.rng(), context.partition, context.threads
        )
    size = energy_norm(profile, context.partition)
    if size == 0.0:
        raise ArgumentError("the threshold search needs a nonzero initial profile")
    profile = profile * (1.0 / size)
    history: list[dict] = []

    def trial(amplitude: float) -> bool:
        ok, report = _contracts(profile, amplitude, horizon, context)
        history.append(
            {
                "amplitude": amplitude,
                "contracted": ok,
                "iterations": report.iterations if report else None,
            }
        )
        return ok

    hi = upper
    if trial(hi):
        return ThresholdReport(threshold=hi, trials=history)
    lo = 0.0
    for _ in range(bisections):
        candidate = hi / 2.0
        if trial(candidate):
            lo = candidate
            break
        hi = candidate
    if lo == 0.0:
        logger.warning(f"Picard did not contract for any amplitude down to {hi:.3e}")
        return ThresholdReport(threshold=0.0, trials=history)
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        if trial(mid):
            lo = mid
        else:
            hi = mid
    logger.info(f"empirical small-data threshold {lo:.3e}")
    return ThresholdReport(threshold=lo, trials=history)
