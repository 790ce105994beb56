"""Exact free transport on the Fourier side."""

from functools import lru_cache

import numpy as np

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField


@lru_cache(maxsize=8)
def advection_symbol(lattice: FrequencyLattice, grid: VelocityGrid) -> np.ndarray:
    """k . v for every (k, v), shape (N, N, N, M)."""
    return np.einsum("axyz,ma->xyzm", lattice.wavevectors, grid.velocities)


def _symbol(g: SpectralField) -> np.ndarray:
    if g.grid is None:
        raise ArgumentError("transport acts on kinetic fields")
    return advection_symbol(g.lattice, g.grid)


def transport(g: SpectralField, dt: float) -> SpectralField:
    """Solve d_t g + v . grad_x g = 0 over ``dt``: multiply by exp(-i (k.v) dt)."""
    return g.with_coeffs(g.coeffs * np.exp(-1j * dt * _symbol(g)))


def transport_term(g: SpectralField) -> SpectralField:
    """-v . grad_x g."""
    return g.with_coeffs(-1j * _symbol(g) * g.coeffs)
