"""Velocity-space inequalities of the collision operator.

Every check draws its samples from ``FieldFamily.velocity_triple`` and
evaluates both sides on the family's velocity grid. Ratios are
LHS / RHS-without-constant; the Gamma bounds are also re-evaluated on the
triple scaled by ``SCALE`` to confirm the ratio is scale invariant.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.kernel import CollisionKernel
from boltzbesov.collision.norms import (
    TripleNormForm,
    dissipation_D,
    weighted_l2_norm,
    weighted_sobolev_norm,
)
from boltzbesov.collision.operators import CollisionOperator
from boltzbesov.collision.oracles import compare_weak_strong
from boltzbesov.constants import KERNEL_PRESETS
from boltzbesov.kinetics.energy import EnergyFunctionalParams, energy_bound_terms, energy_Eq
from boltzbesov.kinetics.maxwellian import (
    invariants,
    kernel_basis,
    maxwellian,
    maxwellian_power,
)
from boltzbesov.kinetics.moments import moment_A, moment_B
from boltzbesov.utils.parallel import parallel_map
from boltzbesov.verify.families import FieldFamily, VerifyContext
from boltzbesov.verify.report import ConstantReport, sample_ratio

logger = logging.getLogger(__name__)

SCALE = 2.0


@dataclass(frozen=True)
class VelocityNorms:
    """Norms on one velocity grid for one kernel."""

    grid: VelocityGrid
    form: TripleNormForm
    gamma: float
    nu: float

    @property
    def weight(self) -> float:
        """(gamma + nu) / 2, the natural weight of the dissipation."""
        return 0.5 * (self.gamma + self.nu)

    def l2(self, f: np.ndarray, ell: float = 0.0, mu_power: float = 0.0) -> float:
        return float(weighted_l2_norm(f, self.grid, ell, mu_power))

    def triple(self, f: np.ndarray) -> float:
        return float(self.form.norm(f))

    def sobolev(self, f: np.ndarray, ell: float) -> float:
        return float(weighted_sobolev_norm(f, self.grid, 0.5 * self.nu, ell))


def velocity_norms(vctx: VerifyContext, grid: VelocityGrid) -> VelocityNorms:
    return VelocityNorms(grid, vctx.form(grid), vctx.kernel.gamma, vctx.kernel.nu)


def gamma_inner(op: CollisionOperator, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> float:
    """(Gamma(f, g), h)_{L^2_v}."""
    return float(op.grid.inner(op.gamma(f, g), h))


GammaRhs = Callable[[VelocityNorms, np.ndarray, np.ndarray, np.ndarray], float]


def rhs_amuxy(n: VelocityNorms, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> float:
    """||f|| |||g||| |||h|||."""
    return n.l2(f) * n.triple(g) * n.triple(h)


def rhs_another_type(n: VelocityNorms, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> float:
    """||mu^(1/10) f|| |||g||| |||h||| + ||f||_w min(||g||_w ||h||, ||g|| ||h||_w)."""
    w = n.weight
    local = n.l2(f, mu_power=0.1) * n.triple(g) * n.triple(h)
    tail = n.l2(f, ell=w) * min(n.l2(g, ell=w) * n.l2(h), n.l2(g) * n.l2(h, ell=w))
    return local + tail


def rhs_weighted(alpha: float, beta: float) -> GammaRhs:
    """||mu^(1/10) f|| |||g||| |||h||| + ||f||_{-alpha} ||g||_{w+alpha-beta} ||h||_{w+beta}."""

    def rhs(n: VelocityNorms, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> float:
        w = n.weight
        local = n.l2(f, mu_power=0.1) * n.triple(g) * n.triple(h)
        tail = n.l2(f, ell=-alpha) * n.l2(g, ell=w + alpha - beta) * n.l2(h, ell=w + beta)
        return local + tail

    return rhs


def gamma_bounds(vctx: VerifyContext) -> dict[str, tuple[str, GammaRhs]]:
    """Upper bounds of |(Gamma(f, g), h)| that apply to the context's kernel."""
    kernel = vctx.kernel
    bounds: dict[str, tuple[str, GammaRhs]] = {
        "gamma.amuxy": ("|(Gamma(f,g),h)| against ||f|| |||g||| |||h|||", rhs_amuxy),
        "gamma.weighted_zero": (
            "|(Gamma(f,g),h)| against the weighted bound with alpha = beta = 0",
            rhs_weighted(0.0, 0.0),
        ),
    }
    if not kernel.hard_potential:
        w = 0.5 * (kernel.gamma + kernel.nu)
        bounds["gamma.another_type"] = (
            "|(Gamma(f,g),h)| against the mu^(1/10) plus weighted-min bound",
            rhs_another_type,
        )
        bounds["gamma.weighted_soft"] = (
            f"|(Gamma(f,g),h)| against the weighted bound with alpha = {-w:g}, beta = {w:g}",
            rhs_weighted(-w, w),
        )
    return bounds


def check_gamma_bounds(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """All applicable Gamma upper bounds, sharing one collision sweep per sample."""
    op = vctx.operator(family.grid)
    norms = velocity_norms(vctx, family.grid)
    bounds = gamma_bounds(vctx)
    reports = {key: vctx.report(key, text, family) for key, (text, _) in bounds.items()}

    def evaluate(i: int) -> dict[str, tuple[Optional[float], Optional[float]]]:
        f, g, h = family.velocity_triple(i)
        lhs = abs(gamma_inner(op, f, g, h))
        lhs_scaled = abs(gamma_inner(op, SCALE * f, SCALE * g, SCALE * h))
        return {
            key: (
                sample_ratio(lhs, rhs(norms, f, g, h)),
                sample_ratio(lhs_scaled, rhs(norms, SCALE * f, SCALE * g, SCALE * h)),
            )
            for key, (_, rhs) in bounds.items()
        }

    for i, values in enumerate(parallel_map(evaluate, range(family.count), vctx.threads)):
        for key, (ratio, scaled) in values.items():
            reports[key].add(ratio)
            reports[key].check_scaling(ratio, scaled, i)
    return list(reports.values())


def check_l2_smallness(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """|(L2 f, g)| against ||mu^(1/1000) f|| ||mu^(1/1000) g||."""
    report = vctx.report(
        "linear.l2_smallness", "|(L2 f, g)| against ||mu^0.001 f|| ||mu^0.001 g||", family
    )
    op = vctx.operator(family.grid)
    l2 = op.linear_matrices().l2
    norms = velocity_norms(vctx, family.grid)

    def ratio(f: np.ndarray, g: np.ndarray) -> Optional[float]:
        lhs = abs(float(family.grid.inner(l2 @ f, g)))
        return sample_ratio(lhs, norms.l2(f, mu_power=1e-3) * norms.l2(g, mu_power=1e-3))

    for i in range(family.count):
        f, g, _ = family.velocity_triple(i)
        value = ratio(f, g)
        report.add(value)
        report.check_scaling(value, ratio(SCALE * f, SCALE * g), i)
    return report


def check_projection_bound(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """|||P f||| against ||f||."""
    report = vctx.report("triple.projection", "|||P f||| against ||f||_{L^2_v}", family)
    projector = vctx.operator(family.grid).kernel_projector
    norms = velocity_norms(vctx, family.grid)
    for i in range(family.count):
        f = family.velocity_sample(i)
        report.add(sample_ratio(norms.triple(projector @ f), norms.l2(f)))
    return report


def check_dissipation_bound(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """D(mu^(1/2) |f|, h) against ||mu^(1/10) f|| |||h|||^2."""
    report = vctx.report(
        "dissipation.bound", "D(mu^(1/2)|f|, h) against ||mu^(1/10) f|| |||h|||^2", family
    )
    grid = family.grid
    sqrt_mu = maxwellian_power(grid, 0.5)
    norms = velocity_norms(vctx, grid)

    def ratio(i: int) -> Optional[float]:
        f, _, h = family.velocity_triple(i)
        lhs = dissipation_D(sqrt_mu * np.abs(f), h, vctx.kernel, grid)
        return sample_ratio(lhs, norms.l2(f, mu_power=0.1) * norms.triple(h) ** 2)

    for r in parallel_map(ratio, range(family.count), vctx.threads):
        report.add(r)
    return report


def check_sandwich(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """Weighted Sobolev bounds of |||f||| from below and above.

    lower: ||f||^2_{H^{nu/2}_{gamma/2}} + ||f||^2_{L^2_{(gamma+nu)/2}} <= C |||f|||^2
    upper: |||f|||^2 <= C ||f||^2_{H^{nu/2}_{(gamma+nu)/2}}
    """
    norms = velocity_norms(vctx, family.grid)
    gamma, nu = vctx.kernel.gamma, vctx.kernel.nu
    lower = vctx.report(
        "sandwich.lower",
        f"||f||^2 in H^{nu / 2:g}_{gamma / 2:g} + L^2_{norms.weight:g} against |||f|||^2",
        family,
    )
    upper = vctx.report(
        "sandwich.upper",
        f"|||f|||^2 against ||f||^2 in H^{nu / 2:g}_{norms.weight:g}",
        family,
    )

    def ratios(f: np.ndarray) -> tuple[Optional[float], Optional[float]]:
        t2 = norms.triple(f) ** 2
        low = norms.sobolev(f, 0.5 * gamma) ** 2 + norms.l2(f, ell=norms.weight) ** 2
        high = norms.sobolev(f, norms.weight) ** 2
        return sample_ratio(low, t2), sample_ratio(t2, high)

    for i in range(family.count):
        f = family.velocity_sample(i)
        low, high = ratios(f)
        low_s, high_s = ratios(SCALE * f)
        lower.add(low)
        upper.add(high)
        lower.check_scaling(low, low_s, i)
        upper.check_scaling(high, high_s, i)
    upper.details["frequency_sweep"] = frequency_sweep(norms)
    return [lower, upper]


def frequency_sweep(norms: VelocityNorms) -> list[dict]:
    """|||f|||^2 and ||f||^2_{H^{nu/2}} for f = mu^(1/4) cos(k v_1) at growing k.

    Both sides should grow together as k approaches the grid Nyquist frequency.
    """
    grid = norms.grid
    envelope = maxwellian_power(grid, 0.25)
    v1 = grid.velocities[:, 0]
    rows = []
    for mode in range(1, grid.points // 2):
        k = np.pi * mode / grid.half_width
        f = envelope * np.cos(k * v1)
        t2 = norms.triple(f) ** 2
        h2 = norms.sobolev(f, norms.weight) ** 2
        rows.append({"k": k, "triple_sq": t2, "sobolev_sq": h2, "ratio": sample_ratio(t2, h2)})
    return rows


def check_coercivity(
    family: FieldFamily, vctx: VerifyContext, op: Optional[CollisionOperator] = None
) -> ConstantReport:
    """(L1 f, f) >= lambda_0 |||f||| ^2 on microscopic f.

    The fitted constant is the minimum ratio and must be strictly positive.
    A value of (L1 f, f) below minus the equilibrium floor times the
    collision-frequency norm (Lambda mu) f^2 is a hard failure.
    """
    report = vctx.report(
        "coercivity.lambda0", "(L1 f, f) against |||(I - P) f|||^2 (minimum)", family, mode="min"
    )
    op = op or vctx.operator(family.grid)
    grid = family.grid
    l1 = op.linear_matrices().l1
    projector = op.kernel_projector
    frequency = op.loss_matrix @ op.mu
    tolerance = op.floor().tolerance("equilibrium")
    norms = velocity_norms(vctx, grid)
    for i in range(family.count):
        sample = family.velocity_sample(i)
        f = sample - projector @ sample
        lhs = float(grid.inner(l1 @ f, f))
        report.add(sample_ratio(lhs, norms.triple(f) ** 2))
        if lhs < -tolerance * float(grid.inner(frequency * f, f)):
            report.fail(f"sample {i}: (L1 f, f) = {lhs:.3e} is negative beyond the floor")
    if report.measured and report.constant <= 0.0:
        report.fail(f"lambda_0 = {report.constant:.3e} is not positive")
    report.details["floor_tolerance"] = tolerance
    return report


def check_preset_coercivity(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """Coercivity at the soft and the hard default (gamma, nu), on this context's quadrature."""
    quadrature = vctx.kernel.model_dump(exclude={"gamma", "nu"})
    reports = []
    for name in KERNEL_PRESETS:
        kernel = CollisionKernel.preset(name, **quadrature)
        report = check_coercivity(family, replace(vctx, kernel=kernel))
        report.id = f"coercivity.lambda0.{name}"
        reports.append(report)
    return reports


def check_linear_split(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """(1/2)(L f, f) against (L1 f, f); records how much of L the L1 part carries."""
    report = vctx.report("linear.split", "(1/2)(L f, f) against (L1 f, f)", family)
    mats = vctx.operator(family.grid).linear_matrices()
    grid = family.grid
    slack = []
    for i in range(family.count):
        f = family.velocity_sample(i)
        l1 = float(grid.inner(mats.l1 @ f, f))
        full = float(grid.inner(mats.full @ f, f))
        report.add(sample_ratio(0.5 * full, l1))
        slack.append(l1 - 0.5 * full)
    report.details["min_slack"] = min(slack, default=0.0)
    return report


def check_moment_bounds(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """|A(g)| + |B(g)| against ||g||_{L^2_{(gamma+nu)/2}}."""
    norms = velocity_norms(vctx, family.grid)
    report = vctx.report(
        "moments.AB", f"|A_ij(g)|, |B_i(g)| against ||g||_(L^2_{norms.weight:g})", family
    )
    grid = family.grid
    for i in range(family.count):
        g = family.velocity_sample(i)
        size = float(np.sqrt(np.sum(moment_A(g, grid) ** 2) + np.sum(moment_B(g, grid) ** 2)))
        report.add(sample_ratio(size, norms.l2(g, ell=norms.weight)))
    return report


def check_energy_functional(family: FieldFamily, vctx: VerifyContext) -> ConstantReport:
    """|E_q(g)| against the square of its Cauchy-Schwarz bound terms, per block."""
    report = vctx.report(
        "energy.functional_bound", "|E_q(g)| against the squared bound terms", family
    )
    params = EnergyFunctionalParams(delta2=vctx.delta2, delta3=vctx.delta3)
    part = family.partition

    def ratios(i: int) -> list[Optional[float]]:
        g = family.kinetic_sample(i)
        return [
            sample_ratio(
                abs(energy_Eq(g, q, params, part).total), energy_bound_terms(g, q, part) ** 2
            )
            for q in part.block_range
        ]

    for values in parallel_map(ratios, range(family.count), vctx.threads):
        for r in values:
            report.add(r)
    return report


def check_weak_strong(
    family: FieldFamily,
    vctx: VerifyContext,
    op: Optional[CollisionOperator] = None,
    nearest: Optional[CollisionOperator] = None,
) -> ConstantReport:
    """Raw strong quadrature against the weak-form oracle, as difference / error estimate."""
    report = vctx.report(
        "collision.weak_strong",
        "|strong - weak| against the interpolation spread, tail and sigma-refinement estimate",
        family,
        track_stability=False,
    )
    grid = family.grid
    sqrt_mu = maxwellian_power(grid, 0.5)
    comparisons = []
    for i in range(family.count):
        f, g, h = family.velocity_triple(i)
        cmp = compare_weak_strong(sqrt_mu * f, sqrt_mu * g, h, vctx.kernel, grid, op, nearest)
        comparisons.append(cmp.to_dict())
        report.add(sample_ratio(cmp.difference, cmp.error_estimate))
        if not cmp.consistent:
            report.fail(
                f"sample {i}: strong {cmp.strong:.6e} and weak {cmp.weak:.6e} differ by "
                f"{cmp.difference:.3e} > {cmp.error_estimate:.3e}"
            )
    report.details["comparisons"] = comparisons
    return report


def check_zero_identities(
    family: FieldFamily, vctx: VerifyContext, op: Optional[CollisionOperator] = None
) -> ConstantReport:
    """Vanishing identities of the raw quadrature against their own equilibrium floors.

    Q(mu, mu) is measured on the conservative operator, L(ker L) on the
    unclosed linearization and, per sample, the invariant moments of the
    unprojected Q(F, F) together with the macroscopic part of Gamma(g, g).
    Each value is relative to the loss term it cancels and is compared with
    ``FLOOR_FACTOR`` times the same functional evaluated on mu.
    """
    report = vctx.report(
        "collision.zero_identities",
        "vanishing identities against their quadrature floors",
        family,
        track_stability=False,
    )
    op = op or vctx.operator(family.grid)
    grid = family.grid
    floor = op.floor()
    report.details.update(floor.to_dict())

    def check(label: str, value: float, name: str) -> None:
        tolerance = floor.tolerance(name)
        report.add(sample_ratio(value, tolerance))
        if value > tolerance:
            report.fail(f"{label} = {value:.3e} exceeds {tolerance:.3e}")

    mu = maxwellian(grid)
    equilibrium = float(grid.norm(op.collide(mu, mu)) / grid.norm(op.loss(mu, mu)))
    residuals = op.kernel_residuals()
    report.details["Q(mu,mu)"] = equilibrium
    report.details["L(ker L)"] = residuals.tolist()
    check("Q(mu,mu)", equilibrium, "equilibrium")
    check("L(ker L)", float(np.max(residuals[1:])), "kernel")

    h3 = grid.cell_volume
    basis = kernel_basis(grid)
    gram = h3 * basis @ basis.T
    phi = invariants(grid)
    for i in range(family.count):
        g = family.velocity_sample(i)
        if not np.any(g):
            report.add(None)
            continue
        big_f = op.sqrt_mu * g
        raw = op.collide(big_f, big_f, conservative=False)
        scale = op.loss(big_f, big_f)
        moments = op.relative_moments(raw, scale)
        weight = phi.T @ np.linalg.solve(gram, h3 * basis @ g)
        size = float(np.sum(np.abs(scale * weight)))
        macro = abs(float(np.sum(raw * weight))) / size if size > 0.0 else 0.0
        check(f"sample {i}: invariant moments / (Gamma(g,g), Pg)", max(moments, macro), "moments")
    return report


def check_upper_bounds(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """Gamma, L2, projection and dissipation upper bounds."""
    return [
        *check_gamma_bounds(family, vctx),
        check_l2_smallness(family, vctx),
        check_projection_bound(family, vctx),
        check_dissipation_bound(family, vctx),
    ]


def collision_checks(family: FieldFamily, vctx: VerifyContext) -> list[ConstantReport]:
    """Every velocity-space check on one family."""
    reports = [
        check_zero_identities(family, vctx),
        *check_sandwich(family, vctx),
        check_coercivity(family, vctx),
        check_linear_split(family, vctx),
        *check_upper_bounds(family, vctx),
    ]
    logger.info(f"collision checks on N_v={family.grid.points}: {len(reports)} reports")
    return reports
