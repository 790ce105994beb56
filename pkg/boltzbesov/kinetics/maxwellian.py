"""The global Maxwellian and the collision-invariant basis."""

import numpy as np

from boltzbesov.collision.grid import VelocityGrid

NORMALIZATION = (2.0 * np.pi) ** -1.5
INVARIANT_NAMES = ("1", "v_1", "v_2", "v_3", "|v|^2")


def maxwellian_at(points: np.ndarray, power: float = 1.0) -> np.ndarray:
    """mu(v)^power at arbitrary velocities, last axis of length 3."""
    speed2 = np.sum(np.asarray(points, dtype=float) ** 2, axis=-1)
    return NORMALIZATION**power * np.exp(-0.5 * power * speed2)


def maxwellian(grid: VelocityGrid) -> np.ndarray:
    """mu = (2 pi)^(-3/2) exp(-|v|^2/2) on the grid."""
    return maxwellian_at(grid.velocities)


def maxwellian_power(grid: VelocityGrid, power: float) -> np.ndarray:
    """mu^power on the grid (mu^(1/2), mu^(1/10), ...)."""
    return maxwellian_at(grid.velocities, power)


def invariants(grid: VelocityGrid) -> np.ndarray:
    """Collision invariants {1, v_1, v_2, v_3, |v|^2}, shape (5, M)."""
    v = grid.velocities
    return np.vstack([np.ones(grid.size), v.T, grid.speed_squared])


def kernel_basis(grid: VelocityGrid) -> np.ndarray:
    """Basis of ker L: the invariants times mu^(1/2), shape (5, M)."""
    return invariants(grid) * maxwellian_power(grid, 0.5)[None, :]
