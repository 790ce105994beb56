"""Time-integrated trilinear estimates and the T-estimate on synthetic trajectories."""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.integrate import trapezoid

from boltzbesov.collision.fields import gamma_field
from boltzbesov.collision.operators import CollisionOperator
from boltzbesov.errors import ArgumentError, PreconditionError
from boltzbesov.kinetics.maxwellian import maxwellian_power
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.spaces.norms import (
    INF,
    NormParams,
    chemin_lerner_norm,
    iterated_norm,
    time_norm,
    triple_chemin_lerner_norm,
)
from boltzbesov.spaces.partition import DyadicPartition, block_decomposition, default_partition
from boltzbesov.state import Trajectory
from boltzbesov.utils.parallel import parallel_map
from boltzbesov.verify.families import FieldFamily, VerifyContext
from boltzbesov.verify.report import ConstantReport, sample_ratio

logger = logging.getLogger(__name__)

# sup: sup-in-time f; mixed: time-integrated and sup-in-time f;
# weighted: mixed with a velocity-weighted tail of f (gamma + nu <= 0 only)
Variant = Literal["sup", "mixed", "weighted"]
VARIANTS: tuple[Variant, ...] = ("sup", "mixed", "weighted")
SCALE = 2.0


def trilinear_A(
    f: Trajectory,
    g: Trajectory,
    h: Trajectory,
    op: CollisionOperator,
    s: float = 1.5,
    partition: Optional[DyadicPartition] = None,
    workers: int = 1,
) -> float:
    """sum_q 2^{qs} (int |(Delta_q Gamma(f, g), Delta_q h)_{x,v}| dt)^(1/2).

    The three trajectories must share their snapshot times; the time
    integral is the composite trapezoid rule over them.

    Raises:
        ArgumentError: Mismatched snapshot times or fewer than two snapshots
    """
    for traj in (f, g, h):
        traj.validate(2)
    if not (np.allclose(f.times, g.times) and np.allclose(f.times, h.times)):
        raise ArgumentError("trilinear form needs trajectories on the same snapshot times")
    part = partition or default_partition(f.fields[0].lattice)

    series: list[dict[int, float]] = []
    for fn, gn, hn in zip(f.fields, g.fields, h.fields):
        gamma = gamma_field(op, fn, gn, workers)
        gamma_blocks = block_decomposition(gamma, part)
        h_blocks = block_decomposition(hn, part)
        series.append({q: abs(gamma_blocks[q].inner(h_blocks[q])) for q in gamma_blocks})

    times = np.asarray(f.times)
    total = 0.0
    for q in series[0]:
        integral = float(trapezoid([v[q] for v in series], times))
        total += 2.0 ** (q * s) * math.sqrt(max(integral, 0.0))
    return total


@dataclass
class TrajectoryNorms:
    """Right-hand-side norms of the trilinear estimates for one kernel."""

    form: np.ndarray
    partition: DyadicPartition
    weight: float

    def sup_besov(self, traj: Trajectory, s: float) -> float:
        """L~^inf_T L~^2_v(B^s_{2,1})."""
        return chemin_lerner_norm(traj, NormParams(s=s, r=1.0, alpha=INF), self.partition)

    def l2_homogeneous(self, traj: Trajectory) -> float:
        """L^2_T L^2_v(Bdot^{3/2}_{2,1})."""
        params = NormParams(s=1.5, r=1.0, alpha=2.0, homogeneous=True)
        return iterated_norm(traj, params, self.partition)

    def triple(
        self, traj: Trajectory, s: float, p: float = 2.0, homogeneous: bool = False
    ) -> float:
        """T^s_{T,p,2} (dotted with ``homogeneous``)."""
        return triple_chemin_lerner_norm(traj, self.form, s, p, 2.0, homogeneous, self.partition)


def weighted_trajectory(traj: Trajectory, weight: np.ndarray) -> Trajectory:
    return traj.map(lambda g: g.weighted(weight))


def trilinear_rhs(
    variant: Variant,
    norms: TrajectoryNorms,
    f: Trajectory,
    g: Trajectory,
    h: Trajectory,
    s: float,
) -> float:
    """Right-hand side of one trilinear estimate without its constant."""
    sq = math.sqrt
    h_part = sq(norms.triple(h, s))
    if variant == "sup":
        return sq(norms.sup_besov(f, 1.5)) * sq(norms.triple(g, 1.5)) * h_part

    def mixed(ff: Trajectory) -> float:
        return sq(norms.l2_homogeneous(ff)) * sq(norms.triple(g, s, INF)) + sq(
            norms.sup_besov(ff, s)
        ) * sq(norms.triple(g, 1.5, homogeneous=True))

    if variant == "mixed":
        return mixed(f) * h_part

    grid = f.fields[0].grid
    if grid is None:
        raise ArgumentError("trilinear estimates need kinetic fields")
    local = weighted_trajectory(f, maxwellian_power(grid, 0.1))
    tail = weighted_trajectory(f, grid.japanese_bracket**norms.weight)
    weighted = sq(norms.l2_homogeneous(tail)) * sq(norms.sup_besov(g, s)) + sq(
        norms.sup_besov(tail, s)
    ) * sq(norms.l2_homogeneous(g))
    return (mixed(local) + weighted) * h_part


def check_trilinear(
    family: FieldFamily, vctx: VerifyContext, s: float = 1.5, variant: Variant = "sup"
) -> ConstantReport:
    """Fitted constant of A_T(f, g, h) against one trilinear right-hand side.

    Raises:
        ArgumentError: s outside (0, 3/2] or an unknown variant
        PreconditionError: The weighted variant with gamma + nu > 0
    """
    if not 0.0 < s <= 1.5:
        raise ArgumentError(f"trilinear regularity s must lie in (0, 3/2], got {s}")
    if variant not in VARIANTS:
        raise ArgumentError(f"unknown trilinear variant '{variant}'")
    if variant == "weighted" and vctx.kernel.hard_potential:
        raise PreconditionError(
            "the weighted variant needs gamma + nu <= 0, "
            f"got {vctx.kernel.gamma + vctx.kernel.nu:g}"
        )
    if family.snapshots < 2:
        raise ArgumentError("trilinear checks need at least two snapshots")

    report = vctx.report(
        f"trilinear.{variant}",
        f"A_T(f, g, h) with s = {s:g} against the {variant} right-hand side",
        family,
        snapshots=family.snapshots,
    )
    report.details["s"] = s
    report.details["cadence"] = family.horizon / (family.snapshots - 1)
    op = vctx.operator(family.grid)
    norms = TrajectoryNorms(
        form=vctx.form(family.grid).matrix,
        partition=family.partition,
        weight=0.5 * (vctx.kernel.gamma + vctx.kernel.nu),
    )

    def ratios(i: int) -> tuple[Optional[float], Optional[float]]:
        f, g, h = (family.trajectory(i, role) for role in range(3))
        lhs = trilinear_A(f, g, h, op, s, family.partition)
        rhs = trilinear_rhs(variant, norms, f, g, h, s)
        f2, g2, h2 = (t.map(lambda x: x * SCALE) for t in (f, g, h))
        lhs2 = trilinear_A(f2, g2, h2, op, s, family.partition)
        rhs2 = trilinear_rhs(variant, norms, f2, g2, h2, s)
        return sample_ratio(lhs, rhs), sample_ratio(lhs2, rhs2)

    for i, (ratio, scaled) in enumerate(
        parallel_map(ratios, range(family.count), vctx.threads)
    ):
        report.add(ratio)
        report.check_scaling(ratio, scaled, i)
    logger.info(f"trilinear {variant}: constant {report.constant:.3e} over {family.count} samples")
    return report


def check_trilinear_variants(
    family: FieldFamily, vctx: VerifyContext, s: float = 1.5
) -> list[ConstantReport]:
    """Every admissible variant; the weighted one is skipped for gamma + nu > 0."""
    variants = [v for v in VARIANTS if v != "weighted" or not vctx.kernel.hard_potential]
    return [check_trilinear(family, vctx, s, v) for v in variants]


def without_mean(g: SpectralField) -> SpectralField:
    """Drop the k = 0 mode, which no homogeneous block sees."""
    coeffs = g.coeffs.copy()
    coeffs[0, 0, 0] = 0.0
    return g.with_coeffs(coeffs)


def sup_triple_in_time(traj: Trajectory, form: np.ndarray) -> float:
    """(int || |||f(t, x, .)||| ||^2_{L^inf_x} dt)^(1/2)."""
    values = []
    for g in traj.fields:
        phys = g.to_physical().reshape(-1, form.shape[0])
        pointwise = np.einsum("km,mn,kn->k", phys, form, phys)
        values.append(math.sqrt(max(float(np.max(pointwise)), 0.0)))
    return time_norm(np.array(values), np.asarray(traj.times), 2.0)


def check_t_estimate(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """L^2_T of sup_x |||f||| against the dotted T^{3/2}_{T,2,2} norm, on mean-free samples."""
    report = vctx.report(
        "trilinear.t_estimate",
        "(int sup_x |||f|||^2 dt)^(1/2) against Tdot^{3/2}_{T,2,2}",
        family,
        snapshots=family.snapshots,
    )
    if family.snapshots < 2:
        raise ArgumentError("the T-estimate needs at least two snapshots")
    form = vctx.form(family.grid).matrix

    def ratio(traj: Trajectory) -> Optional[float]:
        rhs = triple_chemin_lerner_norm(traj, form, 1.5, 2.0, 2.0, True, family.partition)
        return sample_ratio(sup_triple_in_time(traj, form), rhs)

    def ratios(i: int) -> tuple[Optional[float], Optional[float]]:
        traj = family.trajectory(i).map(without_mean)
        return ratio(traj), ratio(traj.map(lambda g: g * SCALE))

    for i, (value, scaled) in enumerate(
        parallel_map(ratios, range(family.count), vctx.threads)
    ):
        report.add(value)
        report.check_scaling(value, scaled, i)
    return report
