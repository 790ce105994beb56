"""Strang splitting: half transport, collision substep, half transport."""

import logging
from collections.abc import Callable
from typing import Optional

import numpy as np
import scipy.linalg

from boltzbesov.collision.fields import apply_matrix, gamma_field
from boltzbesov.collision.operators import CollisionOperator
from boltzbesov.config import SimulationConfig
from boltzbesov.errors import ConfigurationError, ConvergenceError, NumericalAbort
from boltzbesov.solver.regularizer import Regularizer, apply_regularizer
from boltzbesov.solver.transport import transport
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.state import SolverState, Trajectory

logger = logging.getLogger(__name__)

# N(g, t): every collision term except -L1 g
Source = Callable[[SpectralField, float], SpectralField]


def nonlinear_source(
    op: CollisionOperator, include_nonlinear: bool = True, workers: int = 1
) -> Source:
    """N(g) = -L2 g + Gamma(g, g) for the full perturbation equation."""
    l2 = op.linear_matrices().l2

    def source(g: SpectralField, t: float) -> SpectralField:
        out = apply_matrix(-l2, g)
        if include_nonlinear:
            out = out + gamma_field(op, g, workers=workers)
        return out

    return source


def linear_source(
    op: CollisionOperator,
    forcing: Callable[[float], SpectralField],
    include_nonlinear: bool = True,
    workers: int = 1,
) -> Source:
    """N(g, t) = Gamma(f(t), g) - L2 f(t) for the linear Cauchy problem."""
    l2 = op.linear_matrices().l2

    def source(g: SpectralField, t: float) -> SpectralField:
        f = forcing(t)
        out = apply_matrix(-l2, f)
        if include_nonlinear:
            out = out + gamma_field(op, f, g, workers=workers)
        return out

    return source


def _check_finite(g: SpectralField, substep: str, step_index: int) -> SpectralField:
    if not np.all(np.isfinite(g.coeffs)):
        raise NumericalAbort(
            f"non-finite values after the {substep} substep of step {step_index}",
            substep=substep,
            step_index=step_index,
        )
    return g


class StrangStepper:
    """One time step of d_t g + v.grad_x g + L1 g = N(g, t).

    The collision substep is explicit RK2 (Heun) or Crank-Nicolson in L1 with
    the source treated by fixed-point iteration.
    """

    def __init__(
        self,
        op: Optional[CollisionOperator],
        config: SimulationConfig,
        source: Optional[Source] = None,
        workers: int = 1,
    ):
        self.op = op
        self.config = config
        self.workers = workers
        self._l1: Optional[np.ndarray] = None
        self.source = source
        if config.include_collision:
            if op is None:
                raise ConfigurationError("collision substep needs a collision operator")
            self._l1 = op.linear_matrices().l1
            self.source = source or nonlinear_source(op, config.include_nonlinear, workers)
        self.regularizer = (
            Regularizer.from_spec(config.regularizer) if config.regularizer.enabled else None
        )
        self._lu: dict[float, tuple] = {}

    @property
    def l1(self) -> np.ndarray:
        if self._l1 is None:
            raise ConfigurationError("collision is disabled in this configuration")
        return self._l1

    def _source(self, g: SpectralField, t: float) -> SpectralField:
        if self.source is None:
            return g * 0.0
        n = self.source(g, t)
        if self.regularizer is not None:
            n = apply_regularizer(n, self.regularizer)
        return n

    def _rhs(self, g: SpectralField, t: float) -> SpectralField:
        return self._source(g, t) - apply_matrix(self.l1, g)

    def check_cfl(self, dt: float) -> float:
        """dt * ||L1||_2; the explicit scheme needs this at most 1."""
        if self._l1 is None:
            return 0.0
        value = dt * float(np.linalg.norm(self._l1, 2))
        if self.config.scheme == "rk2" and value > 1.0:
            raise ConfigurationError(
                f"explicit collision step needs dt*||L1|| <= 1, got {value:.3f}; "
                "reduce dt or use scheme 'semi-implicit'"
            )
        return value

    def _explicit(self, g: SpectralField, t: float, dt: float) -> SpectralField:
        k1 = self._rhs(g, t)
        predictor = g + k1 * dt
        k2 = self._rhs(predictor, t + dt)
        return g + (k1 + k2) * (0.5 * dt)

    def _factor(self, dt: float) -> tuple:
        if dt not in self._lu:
            m = self.l1.shape[0]
            self._lu[dt] = scipy.linalg.lu_factor(np.eye(m) + 0.5 * dt * self.l1)
        return self._lu[dt]

    def _semi_implicit(self, g: SpectralField, t: float, dt: float) -> SpectralField:
        lu = self._factor(dt)
        base = g - apply_matrix(self.l1, g) * (0.5 * dt)
        m = self.l1.shape[0]
        current = g
        norms: list[float] = []
        for _ in range(self.config.inner_max_iter):
            mid = (g + current) * 0.5
            rhs = base + self._source(mid, t + 0.5 * dt) * dt
            solved = scipy.linalg.lu_solve(lu, rhs.coeffs.reshape(-1, m).T).T
            update = current.with_coeffs(solved.reshape(g.coeffs.shape))
            change = (update - current).l2_norm()
            norms.append(change)
            current = update
            if change <= self.config.inner_tol * max(1.0, current.l2_norm()):
                return current
        raise ConvergenceError(
            f"semi-implicit collision step did not converge in {len(norms)} iterations",
            iterate_norms=norms,
        )

    def collide(self, g: SpectralField, t: float, dt: float) -> SpectralField:
        """Collision substep over ``dt`` starting at time ``t``."""
        if self._l1 is None:
            return g
        if self.config.scheme == "semi-implicit":
            return self._semi_implicit(g, t, dt)
        return self._explicit(g, t, dt)

    def step(self, state: SolverState, dt: float) -> SolverState:
        """Advance one Strang step.

        Raises:
            NumericalAbort: Non-finite values, naming the substep
        """
        index = state.step_index
        g = _check_finite(transport(state.g, 0.5 * dt), "transport", index)
        try:
            g = self.collide(g, state.time, dt)
        except ConvergenceError as e:
            e.step_index = index
            raise
        g = _check_finite(g, "collision", index)
        g = _check_finite(transport(g, 0.5 * dt), "transport", index)
        return SolverState(time=state.time + dt, g=g, step_index=index + 1)


def march(
    stepper: StrangStepper,
    g0: SpectralField,
    t_final: float,
    dt: float,
    snapshot_every: int = 1,
    on_step: Optional[Callable[[SolverState], None]] = None,
) -> Trajectory:
    """Advance g0 from t = 0 to ``t_final`` in steps of ``dt``.

    Every step is handed to ``on_step`` (running norms see the full history);
    the returned trajectory keeps every ``snapshot_every``-th state and the last.

    Raises:
        NumericalAbort: Non-finite values in a substep
    """
    steps = max(1, int(round(t_final / dt)))
    stepper.check_cfl(dt)
    state = SolverState(time=0.0, g=g0, step_index=0)
    traj = Trajectory()
    traj.append(0.0, g0)
    if on_step is not None:
        on_step(state)
    for n in range(steps):
        state = stepper.step(state, dt)
        if on_step is not None:
            on_step(state)
        if (n + 1) % snapshot_every == 0 or n + 1 == steps:
            traj.append(state.time, state.g)
    return traj
