"""Checks of the Littlewood-Paley machinery: embeddings and block bounds."""

import logging

import numpy as np

from boltzbesov.constants import UNITY_TOLERANCE
from boltzbesov.spaces.lattice import gradient
from boltzbesov.spaces.norms import (
    INF,
    NormParams,
    besov_norm,
    chemin_lerner_norm,
    iterated_norm,
    sup_norm,
)
from boltzbesov.spaces.partition import block_decomposition, low_pass
from boltzbesov.utils.parallel import parallel_map
from boltzbesov.verify.families import FieldFamily, VerifyContext
from boltzbesov.verify.report import ConstantReport, sample_ratio

logger = logging.getLogger(__name__)

# relative slack for inequalities that hold exactly in exact arithmetic
ROUNDOFF = 1e-12


def check_embedding_monotonicity(
    family: FieldFamily, vctx: VerifyContext, s_low: float = 0.5, s_high: float = 1.5
) -> ConstantReport:
    """||f||_{B^{s_low}} <= C ||f||_{B^{s_high}} for s_low < s_high."""
    report = vctx.report(
        "besov.embedding", f"B^{s_low}_(2,1) against B^{s_high}_(2,1)", family
    )
    low = NormParams(s=s_low, r=1.0)
    high = NormParams(s=s_high, r=1.0)
    part = family.partition

    def ratio(i: int) -> float | None:
        f = family.scalar_sample(i)
        return sample_ratio(besov_norm(f, low, part), besov_norm(f, high, part))

    for r in parallel_map(ratio, range(family.count), vctx.threads):
        report.add(r)
    return report


def check_linf_embedding(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """sup |f| <= C ||f||_{B^{3/2}_{2,1}}, plus the homogeneous variant on mean-free samples."""
    report = vctx.report("besov.linf", "L^inf_x against B^{3/2}_(2,1)", family)
    homogeneous = vctx.report(
        "besov.linf_homogeneous", "L^inf_x against homogeneous B^{3/2}_(2,1)", family
    )
    params = NormParams(s=1.5, r=1.0)
    hom_params = NormParams(s=1.5, r=1.0, homogeneous=True)
    part = family.partition

    def ratios(i: int) -> tuple[float | None, float | None]:
        f = family.scalar_sample(i)
        coeffs = f.coeffs.copy()
        coeffs[0, 0, 0] = 0.0
        mean_free = f.with_coeffs(coeffs)
        return (
            sample_ratio(sup_norm(f), besov_norm(f, params, part)),
            sample_ratio(sup_norm(mean_free), besov_norm(mean_free, hom_params, part)),
        )

    for full, hom in parallel_map(ratios, range(family.count), vctx.threads):
        report.add(full)
        homogeneous.add(hom)
    return [report, homogeneous]


def check_block_boundedness(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """max_q ||Delta_q f|| / ||f|| and max_q ||S_q f|| / ||f|| never exceed one.

    The multipliers take values in [0, 1], so a ratio above one is a
    hard failure rather than a fitted constant.
    """
    report = vctx.report("besov.block_bounded", "||Delta_q f||, ||S_q f|| against ||f||", family)
    part = family.partition

    def ratio(i: int) -> float | None:
        f = family.kinetic_sample(i)
        norm = f.l2_norm()
        blocks = [b.l2_norm() for b in block_decomposition(f, part).values()]
        partial = [low_pass(f, q, part).l2_norm() for q in range(part.q_max + 2)]
        return sample_ratio(max(blocks + partial), norm)

    for i, r in enumerate(parallel_map(ratio, range(family.count), vctx.threads)):
        report.add(r)
        if r is not None and r > 1.0 + ROUNDOFF:
            report.fail(f"sample {i}: block norm ratio {r:.15f} exceeds 1")
    return report


def check_derivative_equivalence(
    family: FieldFamily, vctx: VerifyContext, s: float = 0.5
) -> list[ConstantReport]:
    """||grad f||_{Bdot^s} against ||f||_{Bdot^{s+1}}, both directions."""
    upper = vctx.report(
        "besov.derivative_upper", f"||grad f||_(Bdot^{s}) / ||f||_(Bdot^{s + 1})", family
    )
    lower = vctx.report(
        "besov.derivative_lower", f"||f||_(Bdot^{s + 1}) / ||grad f||_(Bdot^{s})", family
    )
    grad_params = NormParams(s=s, r=1.0, homogeneous=True)
    params = NormParams(s=s + 1.0, r=1.0, homogeneous=True)
    part = family.partition

    def ratios(i: int) -> tuple[float | None, float | None]:
        f = family.scalar_sample(i)
        gf = besov_norm(gradient(f), grad_params, part)
        nf = besov_norm(f, params, part)
        return sample_ratio(gf, nf), sample_ratio(nf, gf)

    for up, down in parallel_map(ratios, range(family.count), vctx.threads):
        upper.add(up)
        lower.add(down)
    return [upper, lower]


def check_chemin_lerner_dominance(
    family: FieldFamily, vctx: VerifyContext, alpha: float = 2.0
) -> ConstantReport:
    """L^alpha_T L^2_v(B^{3/2}_{2,1}) <= L~^alpha_T L~^2_v(B^{3/2}_{2,1}).

    Minkowski's inequality makes this exact for the trapezoid rule too, so
    a ratio above one is a hard failure.
    """
    report = vctx.report(
        "chemin_lerner.dominance",
        f"iterated L^{alpha}_T L^2_v(B^3/2) against the Chemin-Lerner norm",
        family,
        snapshots=family.snapshots,
    )
    if family.snapshots < 2 and alpha != INF:
        alpha = INF
    params = NormParams(s=1.5, r=1.0, alpha=alpha, beta=2.0)
    part = family.partition

    def ratio(i: int) -> float | None:
        traj = family.trajectory(i)
        return sample_ratio(
            iterated_norm(traj, params, part), chemin_lerner_norm(traj, params, part)
        )

    for i, r in enumerate(parallel_map(ratio, range(family.count), vctx.threads)):
        report.add(r)
        if r is not None and r > 1.0 + ROUNDOFF:
            report.fail(f"sample {i}: iterated norm exceeds the Chemin-Lerner norm ({r:.15f})")
    return report


def check_partition_unity(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """Unity residual of the partition and reconstruction error sum_q Delta_q f - f."""
    report = vctx.report(
        "partition.reconstruction",
        "||sum_q Delta_q f - f|| / ||f||",
        family,
        track_stability=False,
    )
    part = family.partition
    residual = part.unity_residual()
    report.details["unity_residual"] = residual
    if residual > UNITY_TOLERANCE:
        report.fail(f"partition of unity residual {residual:.3e}")

    def ratio(i: int) -> float | None:
        f = family.scalar_sample(i)
        rebuilt = f.with_coeffs(
            sum(b.coeffs for b in block_decomposition(f, part).values()) - f.coeffs
        )
        return sample_ratio(rebuilt.l2_norm(), f.l2_norm())

    for i, r in enumerate(parallel_map(ratio, range(family.count), vctx.threads)):
        report.add(r)
        if r is not None and r > UNITY_TOLERANCE:
            report.fail(f"sample {i}: reconstruction error {r:.3e}")
    return report


def embedding_checks(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """Every lattice-side check on one family."""
    reports = [
        check_partition_unity(family, vctx),
        check_embedding_monotonicity(family, vctx),
        *check_linf_embedding(family, vctx),
        check_block_boundedness(family, vctx),
        *check_derivative_equivalence(family, vctx),
        check_chemin_lerner_dominance(family, vctx),
    ]
    measured = np.count_nonzero([len(r.measured) for r in reports])
    logger.info(f"embedding checks: {len(reports)} reports, {measured} with measured samples")
    return reports
