"""Random smooth perturbations and initial data g0."""

import logging
from typing import Optional

import numpy as np
import scipy.fft

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.config import InitialDatumSpec
from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.macro import micro_part
from boltzbesov.kinetics.maxwellian import maxwellian_power
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField
from boltzbesov.spaces.norms import energy_norm
from boltzbesov.spaces.partition import DyadicPartition

logger = logging.getLogger(__name__)

ALL_AXES = (0, 1, 2, 3, 4, 5)


def random_kinetic_field(
    lattice: FrequencyLattice,
    grid: VelocityGrid,
    rng: np.random.Generator,
    k_decay: float = 1.0,
    v_decay: float = 1.0,
    workers: int = 1,
) -> SpectralField:
    """Real random R(x, v) with Gaussian envelopes in x- and v-frequency.

    White noise is filtered by exp(-|k|^2 / 2 k_decay^2) exp(-|xi|^2 / 2 v_decay^2),
    so the result is smooth and its physical samples are real.
    """
    noise = rng.standard_normal(lattice.shape + grid.shape)
    envelope_x = np.exp(-0.5 * (lattice.magnitude / k_decay) ** 2)
    xi_sq = np.sum(grid.frequencies**2, axis=1).reshape(grid.shape)
    envelope_v = np.exp(-0.5 * xi_sq / v_decay**2)
    spectrum = scipy.fft.fftn(noise, axes=ALL_AXES, workers=workers)
    spectrum *= envelope_x[..., None, None, None] * envelope_v
    values = scipy.fft.ifftn(spectrum, axes=ALL_AXES, workers=workers).real
    return SpectralField.from_physical(
        values.reshape(lattice.shape + (grid.size,)), lattice, grid, workers
    )


def scale_to(
    g: SpectralField, amplitude: float, partition: Optional[DyadicPartition] = None
) -> SpectralField:
    """Rescale so that ||g||_{L~^2_v(B^{3/2})} equals ``amplitude`` (zero stays zero)."""
    size = energy_norm(g, partition)
    if size == 0.0:
        return g
    return g * (amplitude / size)


def clip_nonnegative(g: SpectralField, workers: int = 1) -> SpectralField:
    """Raise g to -mu^(1/2) wherever f = mu + mu^(1/2) g would be negative."""
    if g.grid is None:
        raise ArgumentError("clipping needs a kinetic field")
    values = g.to_physical(workers)
    floor = -maxwellian_power(g.grid, 0.5)
    negative = int(np.count_nonzero(values < floor))
    if negative == 0:
        return g
    clipped = SpectralField.from_physical(np.maximum(values, floor), g.lattice, g.grid, workers)
    logger.warning(
        f"clipped {negative} negative values of f0; size {energy_norm(g):.3e} "
        f"became {energy_norm(clipped):.3e}"
    )
    return clipped


def initial_datum(
    spec: InitialDatumSpec,
    lattice: FrequencyLattice,
    grid: VelocityGrid,
    rng: np.random.Generator,
    partition: Optional[DyadicPartition] = None,
    workers: int = 1,
) -> SpectralField:
    """Build g0 = R mu^(1/2) from an initial-datum spec.

    The ``microscopic`` kind removes Pg0. With ``nonnegative`` the scaled
    datum is clipped at -mu^(1/2) so that f0 = mu + mu^(1/2) g0 >= 0; small
    amplitudes are untouched, large ones lose size (and, for the microscopic
    kind, their vanishing macroscopic part).

    Args:
        spec: Initial datum spec
        lattice: Frequency lattice
        grid: Velocity grid
        rng: Random generator seeded by the caller
        partition: Partition for the amplitude norm
        workers: FFT workers

    Returns:
        Kinetic spectral field g0
    """
    if spec.kind == "zero" or spec.amplitude == 0.0:
        return SpectralField.zeros(lattice, grid)

    r = random_kinetic_field(lattice, grid, rng, spec.k_decay, spec.v_decay, workers)
    values = r.to_physical(workers)
    values /= max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    g0 = SpectralField.from_physical(values * maxwellian_power(grid, 0.5), lattice, grid, workers)
    if spec.kind == "microscopic":
        g0 = micro_part(g0)

    g0 = scale_to(g0, spec.amplitude, partition)
    if spec.nonnegative:
        g0 = clip_nonnegative(g0, workers)
    logger.debug(f"initial datum kind={spec.kind} size={energy_norm(g0, partition):.3e}")
    return g0
