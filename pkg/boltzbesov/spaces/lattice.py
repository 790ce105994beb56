"""Periodic frequency lattice and the spectral field container."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.fft

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.constants import DEFAULT_HALF_LENGTH, DEFAULT_LATTICE_POINTS, MIN_LATTICE_POINTS
from boltzbesov.errors import ArgumentError, ConfigurationError

logger = logging.getLogger(__name__)

X_AXES = (0, 1, 2)


@dataclass(frozen=True)
class FrequencyLattice:
    """Torus [0, 2L)^3 sampled with N points per axis; frequencies on (pi/L) Z^3.

    Fourier coefficients use the ``norm="forward"`` convention, so a constant
    field ``c`` has the single coefficient ``c`` at ``k = 0`` and
    ``||f||_{L^2_x}^2 = volume * sum |f_hat|^2``.
    """

    half_length: float = DEFAULT_HALF_LENGTH
    points: int = DEFAULT_LATTICE_POINTS

    def __post_init__(self) -> None:
        n = self.points
        if n < MIN_LATTICE_POINTS or n & (n - 1):
            raise ConfigurationError(
                f"points_per_axis must be a power of two >= {MIN_LATTICE_POINTS}, got {n}"
            )
        if self.half_length <= 0:
            raise ConfigurationError("half_length must be positive")

    @property
    def spacing(self) -> float:
        """Frequency spacing pi/L."""
        return float(np.pi / self.half_length)

    @property
    def volume(self) -> float:
        return float((2.0 * self.half_length) ** 3)

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.points

    @property
    def nyquist(self) -> float:
        """Largest resolvable frequency along one axis."""
        return self.points / 2 * self.spacing

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.points, self.points, self.points)

    @cached_property
    def axis_frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * scipy.fft.fftfreq(self.points, d=self.dx)

    @cached_property
    def wavevectors(self) -> np.ndarray:
        """Array of shape (3, N, N, N) with the lattice wavevectors."""
        k = self.axis_frequencies
        return np.stack(np.meshgrid(k, k, k, indexing="ij"))

    @cached_property
    def magnitude(self) -> np.ndarray:
        return np.sqrt(np.sum(self.wavevectors**2, axis=0))

    @cached_property
    def positions(self) -> np.ndarray:
        """Physical grid points, shape (3, N, N, N)."""
        x = np.arange(self.points) * self.dx
        return np.stack(np.meshgrid(x, x, x, indexing="ij"))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients over the x-lattice with an optional trailing axis.

    ``coeffs`` has shape ``(N, N, N) + tail``. Kinetic fields g(x, v) carry a
    flattened velocity axis ``tail = (M,)`` with ``M = N_v**3`` and a ``grid``;
    macroscopic scalars have ``tail = ()`` and vectors ``tail = (3,)``.
    """

    coeffs: np.ndarray
    lattice: FrequencyLattice
    grid: Optional[VelocityGrid] = None

    def __post_init__(self) -> None:
        if self.coeffs.shape[:3] != self.lattice.shape:
            raise ArgumentError(
                f"coefficient shape {self.coeffs.shape} does not match lattice {self.lattice.shape}"
            )
        if self.grid is not None and self.coeffs.shape[3:] != (self.grid.size,):
            raise ArgumentError(
                f"velocity axis {self.coeffs.shape[3:]} does not match grid size {self.grid.size}"
            )

    @classmethod
    def from_physical(
        cls,
        values: np.ndarray,
        lattice: FrequencyLattice,
        grid: Optional[VelocityGrid] = None,
        workers: int = 1,
    ) -> "SpectralField":
        """Transform physical samples of shape (N, N, N) + tail."""
        coeffs = scipy.fft.fftn(values, axes=X_AXES, norm="forward", workers=workers)
        return cls(np.asarray(coeffs, dtype=complex), lattice, grid)

    @classmethod
    def zeros(
        cls, lattice: FrequencyLattice, grid: Optional[VelocityGrid] = None, tail: tuple = ()
    ) -> "SpectralField":
        if grid is not None:
            tail = (grid.size,)
        return cls(np.zeros(lattice.shape + tail, dtype=complex), lattice, grid)

    @property
    def is_kinetic(self) -> bool:
        return self.grid is not None

    @property
    def tail(self) -> tuple:
        return self.coeffs.shape[3:]

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        """Same lattice and grid, new coefficients."""
        return SpectralField(coeffs, self.lattice, self.grid)

    def to_physical(self, workers: int = 1, real: bool = True) -> np.ndarray:
        """Inverse transform; drops the imaginary part when ``real``."""
        values = scipy.fft.ifftn(self.coeffs, axes=X_AXES, norm="forward", workers=workers)
        return values.real if real else values

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Whether the coefficients describe a real physical field."""
        flipped = np.conj(np.roll(np.flip(self.coeffs, axis=X_AXES), 1, axis=X_AXES))
        scale = max(float(np.max(np.abs(self.coeffs), initial=0.0)), 1.0)
        return bool(np.max(np.abs(self.coeffs - flipped), initial=0.0) <= tol * scale)

    def l2_norm(self) -> float:
        """L^2 norm over x (and v for kinetic fields), via Parseval."""
        total = self.lattice.volume * float(np.sum(np.abs(self.coeffs) ** 2))
        if self.grid is not None:
            total *= self.grid.cell_volume
        return float(np.sqrt(total))

    def inner(self, other: "SpectralField") -> float:
        """Real L^2 inner product over x (and v)."""
        check_compatible(self, other)
        total = self.lattice.volume * float(np.real(np.vdot(self.coeffs, other.coeffs)))
        if self.grid is not None:
            total *= self.grid.cell_volume
        return total

    def __add__(self, other: "SpectralField") -> "SpectralField":
        check_compatible(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        check_compatible(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def weighted(self, weight: np.ndarray) -> "SpectralField":
        """Multiply a kinetic field by a velocity weight of shape (M,)."""
        if self.grid is None:
            raise ArgumentError("velocity weights need a kinetic field")
        return self.with_coeffs(self.coeffs * weight)


def check_compatible(f: SpectralField, g: SpectralField) -> None:
    """Raise unless both fields live on the same lattice and velocity grid."""
    if f.lattice != g.lattice:
        raise ArgumentError(f"mismatched lattices: {f.lattice} vs {g.lattice}")
    if f.grid != g.grid:
        raise ArgumentError("mismatched velocity grids")


def gradient(f: SpectralField) -> SpectralField:
    """Spectral gradient; the new component axis is appended last."""
    k = np.moveaxis(f.lattice.wavevectors, 0, -1)
    k = k.reshape(f.lattice.shape + (1,) * len(f.tail) + (3,))
    return SpectralField(1j * k * f.coeffs[..., None], f.lattice, None)


def divergence(f: SpectralField) -> SpectralField:
    """Spectral divergence of a vector field with trailing component axis 3."""
    if f.tail[-1:] != (3,):
        raise ArgumentError("divergence needs a trailing vector axis of length 3")
    k = np.moveaxis(f.lattice.wavevectors, 0, -1)
    k = k.reshape(f.lattice.shape + (1,) * (len(f.tail) - 1) + (3,))
    return SpectralField(np.sum(1j * k * f.coeffs, axis=-1), f.lattice, None)
