"""Residuals of the fluid-type system satisfied by (a, b, c) and the balance laws."""

import logging
from dataclasses import dataclass, field

import numpy as np

from boltzbesov.collision.fields import gamma_field, linear_field
from boltzbesov.collision.operators import CollisionOperator
from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.macro import project_P
from boltzbesov.kinetics.maxwellian import maxwellian_power
from boltzbesov.kinetics.moments import a_weights, b_weights, balance_weights, moment_field
from boltzbesov.spaces.lattice import SpectralField, divergence, gradient
from boltzbesov.solver.transport import transport_term
from boltzbesov.state import Trajectory

logger = logging.getLogger(__name__)

EQUATIONS = ("a", "b", "c", "A", "B", "mass", "momentum", "energy")


@dataclass
class FluidResidualReport:
    """L^2_x residual norm of every equation at every interior snapshot."""

    times: list[float] = field(default_factory=list)
    residuals: dict[str, list[float]] = field(
        default_factory=lambda: {name: [] for name in EQUATIONS}
    )

    def max_residual(self, name: str) -> float:
        return max(self.residuals[name], default=0.0)

    def summary(self) -> dict[str, float]:
        return {name: self.max_residual(name) for name in EQUATIONS}

    def to_dict(self) -> dict:
        return {"times": self.times, "residuals": self.residuals, "max": self.summary()}


@dataclass(frozen=True)
class _Moments:
    a: SpectralField
    b: SpectralField
    c: SpectralField
    heat: SpectralField
    stress: SpectralField
    A: SpectralField
    B: SpectralField
    balance: dict


def _moments(g: SpectralField) -> _Moments:
    grid = g.grid
    if grid is None:
        raise ArgumentError("velocity moments need a kinetic field")
    macro, pg = project_P(g)
    g2 = g - pg
    s = maxwellian_power(grid, 0.5)
    v = grid.velocities
    heat_w = v * (grid.speed_squared * s)[:, None]
    stress_w = v[:, :, None] * v[:, None, :] * s[:, None, None]
    balance = {
        name: (moment_field(g, rho_w), moment_field(g, flux_w))
        for name, (rho_w, flux_w) in balance_weights(grid).items()
    }
    return _Moments(
        a=macro.a_field,
        b=macro.b_field,
        c=macro.c_field,
        heat=moment_field(g2, heat_w),
        stress=moment_field(g2, stress_w),
        A=moment_field(g2, a_weights(grid)),
        B=moment_field(g2, b_weights(grid)),
        balance=balance,
    )


def _rate(later: SpectralField, earlier: SpectralField, span: float) -> SpectralField:
    return (later - earlier) * (1.0 / span)


def fluid_residual(
    traj: Trajectory, op: CollisionOperator, include_nonlinear: bool = True, workers: int = 1
) -> FluidResidualReport:
    """Residuals of the five fluid-type equation groups and of the balance laws.

    Time derivatives are centered differences over neighbouring snapshots;
    the right-hand sides use R1 = -v.grad g2 and R2 = -L g2 + Gamma(g, g).

    Raises:
        ArgumentError: Fewer than 3 snapshots
    """
    if len(traj) < 3:
        raise ArgumentError(f"fluid residuals need at least 3 snapshots, got {len(traj)}")
    traj.validate(3)
    grid = traj.fields[0].grid
    if grid is None:
        raise ArgumentError("fluid residuals need kinetic snapshots")

    moments = [_moments(g) for g in traj.fields]
    eye = np.eye(3)
    report = FluidResidualReport()
    for n in range(1, len(traj) - 1):
        span = traj.times[n + 1] - traj.times[n - 1]
        prev, cur, nxt = moments[n - 1], moments[n], moments[n + 1]

        def rate(name: str) -> SpectralField:
            return _rate(getattr(nxt, name), getattr(prev, name), span)

        g = traj.fields[n]
        _, pg = project_P(g)
        g2 = g - pg
        r = transport_term(g2) - linear_field(op, g2)
        if include_nonlinear:
            r = r + gamma_field(op, g, workers=workers)
        r_a = moment_field(r, a_weights(grid))
        r_b = moment_field(r, b_weights(grid))

        grad_b = gradient(cur.b).coeffs
        sym_grad_b = grad_b + np.swapaxes(grad_b, -1, -2)
        a_plus = cur.A.with_coeffs(
            nxt.A.coeffs + 2.0 * nxt.c.coeffs[..., None, None] * eye
            - prev.A.coeffs
            - 2.0 * prev.c.coeffs[..., None, None] * eye
        ) * (1.0 / span)

        residual = {
            "a": rate("a") - divergence(cur.heat) * 0.5,
            "b": rate("b") + gradient(cur.a + cur.c * 5.0) + divergence(cur.stress),
            "c": rate("c") + divergence(cur.b) * (1.0 / 3.0) + divergence(cur.heat) * (1.0 / 6.0),
            "A": a_plus + cur.A.with_coeffs(sym_grad_b) - r_a,
            "B": rate("B") + gradient(cur.c) - r_b,
        }
        for name in ("mass", "momentum", "energy"):
            rho_prev, _ = prev.balance[name]
            rho_next, _ = nxt.balance[name]
            _, flux = cur.balance[name]
            residual[name] = _rate(rho_next, rho_prev, span) + divergence(flux)

        report.times.append(traj.times[n])
        for name, value in residual.items():
            report.residuals[name].append(value.l2_norm())
    logger.debug(f"fluid residual maxima {report.summary()}")
    return report
