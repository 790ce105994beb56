"""Mollifiers M^delta, S_delta and the velocity weight W_delta'."""

from dataclasses import dataclass

import numpy as np
import scipy.fft

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.config import RegularizerSpec
from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField
from boltzbesov.spaces.partition import smooth_step

V_AXES = (-3, -2, -1)


def cutoff_profile(tau: np.ndarray) -> np.ndarray:
    """Smooth S with S = 1 on [0, 1], S = 0 on [2, inf) and values in [0, 1]."""
    return 1.0 - smooth_step(np.asarray(tau, dtype=float) - 1.0)


@dataclass(frozen=True)
class Regularizer:
    """The composition W S (M^delta)^2 S W with all factors bounded by one.

    ``delta = 0`` makes M^delta and S_delta the identity, ``delta_prime = 0``
    does the same for W.
    """

    delta: float = 0.0
    delta_prime: float = 0.0
    weight_order: float = 1.0
    mollifier_order: float = 1.0

    def __post_init__(self) -> None:
        if self.delta < 0 or self.delta_prime < 0:
            raise ArgumentError("regularizer scales must be nonnegative")
        if self.weight_order < 1:
            raise ArgumentError("weight order N must be at least 1")

    @classmethod
    def from_spec(cls, spec: RegularizerSpec) -> "Regularizer":
        return cls(
            delta=spec.delta,
            delta_prime=spec.delta_prime,
            weight_order=spec.weight_order,
            mollifier_order=spec.mollifier_order,
        )

    def velocity_mollifier(self, grid: VelocityGrid) -> np.ndarray:
        """M^delta(xi) = (1 + delta <xi>)^(-N0) on the velocity frequencies."""
        bracket = np.sqrt(1.0 + np.sum(grid.frequencies**2, axis=1))
        return (1.0 + self.delta * bracket) ** (-self.mollifier_order)

    def space_cutoff(self, lattice: FrequencyLattice) -> np.ndarray:
        """S_delta(k) = S(delta |k|)."""
        return cutoff_profile(self.delta * lattice.magnitude)

    def weight(self, grid: VelocityGrid) -> np.ndarray:
        """W_delta'(v) = <delta' v>^(-N)."""
        return (1.0 + self.delta_prime**2 * grid.speed_squared) ** (-0.5 * self.weight_order)


def _velocity_multiplier(g: SpectralField, grid: VelocityGrid, symbol: np.ndarray) -> SpectralField:
    cube = g.coeffs.reshape(g.lattice.shape + grid.shape)
    spectrum = scipy.fft.fftn(cube, axes=V_AXES) * symbol.reshape(grid.shape)
    values = scipy.fft.ifftn(spectrum, axes=V_AXES).reshape(g.coeffs.shape)
    return g.with_coeffs(values)


def apply_regularizer(g: SpectralField, reg: Regularizer) -> SpectralField:
    """W S (M^delta)^2 S W g, applied right to left."""
    if g.grid is None:
        raise ArgumentError("the regularizer acts on kinetic fields")
    w = reg.weight(g.grid)
    s = reg.space_cutoff(g.lattice)[..., None]
    out = g.weighted(w)
    out = out.with_coeffs(out.coeffs * s)
    out = _velocity_multiplier(out, g.grid, reg.velocity_mollifier(g.grid) ** 2)
    out = out.with_coeffs(out.coeffs * s)
    return out.weighted(w)
