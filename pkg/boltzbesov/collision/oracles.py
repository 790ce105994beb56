"""Brute-force reference quadratures for the collision layer.

These loop over output cells in Python and evaluate off-grid values with
``scipy.ndimage.map_coordinates`` instead of the configuration stencils, so
they share only the sigma nodes and the collision frame with the production
operators.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import map_coordinates

from boltzbesov.collision.geometry import sigma_vectors
from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.kernel import CollisionKernel, sigma_quadrature
from boltzbesov.collision.operators import CollisionOperator, operator_for
from boltzbesov.kinetics.maxwellian import maxwellian, maxwellian_at

# interpolation-error indicators are scaled by this before comparison
CONSISTENCY_FACTOR = 3.0


def _pointwise(
    values: np.ndarray, grid: VelocityGrid, points: np.ndarray, scheme: str
) -> np.ndarray:
    coords = (points.T + grid.half_width) / grid.spacing - 0.5
    order = 1 if scheme == "trilinear" else 0
    return map_coordinates(
        values.reshape(grid.shape), coords, order=order, mode="grid-constant", cval=0.0
    )


def _configurations(grid: VelocityGrid, kernel: CollisionKernel, i: int):
    """Partners, difference-form and tail weights, and post-collision velocities of cell ``i``."""
    quad = sigma_quadrature(kernel, extrapolate=True)
    theta, psi, w = quad.flat
    panel = quad.flat_panel
    if kernel.nu < 1:
        p = kernel.extrapolation_order
        tail_w = np.where(panel == 0, w, 0.0) / (2.0**p - 1.0)
        w = np.where(panel < 0, 0.0, w)
    else:
        tail_w = np.where(panel < 0, w, 0.0)

    v = grid.velocities
    partners = np.delete(np.arange(grid.size), i)
    u = v[i] - v[partners]
    r = np.sqrt(np.sum(u * u, axis=1))
    sigma = sigma_vectors(u / r[:, None], theta, psi)
    center = 0.5 * (v[i] + v[partners])
    v_prime = center[:, None, :] + 0.5 * r[:, None, None] * sigma
    scale = kernel.phi(r)[:, None] * grid.cell_volume
    return partners, scale * w[None, :], scale * tail_w[None, :], v_prime


def naive_triple_norm(
    f: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid
) -> tuple[float, float]:
    """(J1, J2) by an output-cell loop."""
    mu = maxwellian(grid)
    j1 = j2 = 0.0
    for i in range(grid.size):
        partners, c, _, v_prime = _configurations(grid, kernel, i)
        f_prime = _pointwise(f, grid, v_prime.reshape(-1, 3), kernel.interpolation)
        f_prime = f_prime.reshape(v_prime.shape[:2])
        j1 += float(np.sum(c * mu[partners][:, None] * (f_prime - f[i]) ** 2))
        jump = maxwellian_at(v_prime, 0.5) - np.sqrt(mu[i])
        j2 += float(np.sum(c * f[partners][:, None] ** 2 * jump**2))
    return j1, j2


def naive_dissipation(
    f: np.ndarray, g: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid
) -> float:
    """D(f, g) by an output-cell loop."""
    total = 0.0
    for i in range(grid.size):
        partners, c, _, v_prime = _configurations(grid, kernel, i)
        g_prime = _pointwise(g, grid, v_prime.reshape(-1, 3), kernel.interpolation)
        g_prime = g_prime.reshape(v_prime.shape[:2])
        total += float(np.sum(c * f[partners][:, None] * (g[i] - g_prime) ** 2))
    return total


def weak_form_inner(
    f: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    kernel: CollisionKernel,
    grid: VelocityGrid,
    scheme: str = "trilinear",
) -> tuple[float, float]:
    """(Q(f, g), h) in the weak form: sum of B f_* g (h' - h).

    Returns:
        (value, tail estimate)
    """
    value = tail = 0.0
    for i in range(grid.size):
        partners, c, c_tail, v_prime = _configurations(grid, kernel, i)
        h_prime = _pointwise(h, grid, v_prime.reshape(-1, 3), scheme).reshape(v_prime.shape[:2])
        terms = f[partners][:, None] * g[i] * (h_prime - h[i])
        value += float(np.sum(c * terms))
        tail += float(np.sum(c_tail * terms))
    return value, abs(tail)


@dataclass(frozen=True)
class WeakStrongComparison:
    """Raw strong-form and weak-form values of (Q(f, g), h) with an error budget."""

    strong: float
    weak: float
    error_estimate: float

    @property
    def difference(self) -> float:
        return abs(self.strong - self.weak)

    @property
    def relative_difference(self) -> float:
        """|strong - weak| / |weak| (inf when the weak value vanishes)."""
        if self.weak == 0.0:
            return 0.0 if self.difference == 0.0 else math.inf
        return self.difference / abs(self.weak)

    @property
    def consistent(self) -> bool:
        return self.difference <= self.error_estimate

    def to_dict(self) -> dict:
        return {
            "strong": self.strong,
            "weak": self.weak,
            "difference": self.difference,
            "relative_difference": self.relative_difference,
            "error_estimate": self.error_estimate,
            "consistent": self.consistent,
        }


def compare_weak_strong(
    f: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    kernel: CollisionKernel,
    grid: VelocityGrid,
    op: Optional[CollisionOperator] = None,
    nearest: Optional[CollisionOperator] = None,
) -> WeakStrongComparison:
    """Compare the unprojected strong operator with the weak-form oracle.

    The error estimate is ``CONSISTENCY_FACTOR`` times the sum of the
    trilinear/nearest spread of both forms, the weak-form tail, and the change
    of the weak form when the sigma rule is refined. Every term is measured
    on the oracle side or on the interpolation spread.

    Args:
        f, g, h: Grid functions
        kernel: Collision kernel
        grid: Velocity grid
        op: Strong operator under test (default: the shared trilinear one)
        nearest: Its nearest-neighbour counterpart
    """
    h3 = grid.cell_volume
    op = op or operator_for(grid, kernel)
    nearest = nearest or operator_for(grid, kernel.model_copy(update={"interpolation": "nearest"}))

    strong = float(h3 * np.sum(op.collide(f, g, conservative=False) * h))
    strong_nearest = float(h3 * np.sum(nearest.collide(f, g, conservative=False) * h))

    weak, tail = weak_form_inner(f, g, h, kernel, grid, "trilinear")
    weak_nearest, _ = weak_form_inner(f, g, h, kernel, grid, "nearest")
    finer = kernel.model_copy(update={"n_theta": 2 * kernel.n_theta, "n_psi": 2 * kernel.n_psi})
    weak_finer, _ = weak_form_inner(f, g, h, finer, grid, "trilinear")

    spread = abs(strong - strong_nearest) + abs(weak - weak_nearest)
    estimate = CONSISTENCY_FACTOR * (spread + tail + abs(weak - weak_finer))
    return WeakStrongComparison(strong=strong, weak=weak, error_estimate=estimate)
