"""Truncated velocity grid and off-grid interpolation stencils."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from boltzbesov.constants import (
    DEFAULT_VELOCITY_HALF_WIDTH,
    DEFAULT_VELOCITY_POINTS,
    INTERPOLATION_SCHEMES,
    MIN_VELOCITY_HALF_WIDTH,
)
from boltzbesov.errors import ArgumentError, ConfigurationError

# corner offsets of a trilinear cell, shape (8, 3)
_CORNERS = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)])


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform cell-midpoint grid on [-V, V]^3.

    Grid values are stored flattened in C order, index ``(i*N + j)*N + k``.
    """

    half_width: float = DEFAULT_VELOCITY_HALF_WIDTH
    points: int = DEFAULT_VELOCITY_POINTS

    def __post_init__(self) -> None:
        if self.half_width < MIN_VELOCITY_HALF_WIDTH:
            raise ConfigurationError(
                f"velocity half-width must be >= {MIN_VELOCITY_HALF_WIDTH}, got {self.half_width}"
            )
        if self.points < 2 or self.points % 2:
            raise ConfigurationError(f"points_per_axis must be even, got {self.points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    @property
    def size(self) -> int:
        return self.points**3

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.points, self.points, self.points)

    @cached_property
    def abscissae(self) -> np.ndarray:
        return -self.half_width + (np.arange(self.points) + 0.5) * self.spacing

    @cached_property
    def velocities(self) -> np.ndarray:
        """Grid velocities, shape (M, 3)."""
        a = self.abscissae
        mesh = np.meshgrid(a, a, a, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def speed_squared(self) -> np.ndarray:
        return np.sum(self.velocities**2, axis=1)

    @cached_property
    def japanese_bracket(self) -> np.ndarray:
        """<v> = (1 + |v|^2)^(1/2) on the grid."""
        return np.sqrt(1.0 + self.speed_squared)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Velocity-frequency vectors of the grid FFT, shape (M, 3)."""
        xi = 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)
        mesh = np.meshgrid(xi, xi, xi, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Midpoint rule over the last axis."""
        return np.sum(values, axis=-1) * self.cell_volume

    def inner(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Discrete L^2_v inner product over the last axis."""
        return np.sum(f * g, axis=-1) * self.cell_volume

    def norm(self, f: np.ndarray) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(f) ** 2, axis=-1) * self.cell_volume)

    def stencil(
        self, points: np.ndarray, scheme: str = "trilinear"
    ) -> tuple[np.ndarray, np.ndarray]:
        """Interpolation stencil for off-grid velocities.

        Values beyond the outermost cell centers blend towards zero, i.e. the
        grid function is extended by zero outside the box.

        Args:
            points: Velocities of shape (n, 3)
            scheme: "trilinear" (8 corners) or "nearest" (1 corner)

        Returns:
            (indices, weights), both of shape (n, c); dropped corners carry
            index 0 and weight 0
        """
        if scheme not in INTERPOLATION_SCHEMES:
            raise ArgumentError(f"unknown interpolation scheme '{scheme}'")
        n = self.points
        t = (points + self.half_width) / self.spacing - 0.5

        if scheme == "nearest":
            nearest = np.rint(t).astype(np.int64)
            inside = np.all((nearest >= 0) & (nearest < n), axis=1)
            flat = self._flatten(np.clip(nearest, 0, n - 1))
            return np.where(inside, flat, 0)[:, None], inside.astype(float)[:, None]

        base = np.floor(t).astype(np.int64)
        frac = t - base
        corners = base[:, None, :] + _CORNERS[None, :, :]
        axis_weights = np.where(_CORNERS[None, :, :] == 1, frac[:, None, :], 1.0 - frac[:, None, :])
        weights = np.prod(axis_weights, axis=2)
        inside = np.all((corners >= 0) & (corners < n), axis=2)
        flat = self._flatten(np.clip(corners, 0, n - 1))
        return np.where(inside, flat, 0), np.where(inside, weights, 0.0)

    def interpolate(
        self, values: np.ndarray, points: np.ndarray, scheme: str = "trilinear"
    ) -> np.ndarray:
        """Evaluate grid functions at off-grid velocities.

        Args:
            values: Grid values with the velocity axis last, shape (..., M)
            points: Velocities of shape (n, 3)
            scheme: Interpolation scheme

        Returns:
            Array of shape (..., n)
        """
        idx, w = self.stencil(points, scheme)
        return np.sum(values[..., idx] * w, axis=-1)

    def _flatten(self, index: np.ndarray) -> np.ndarray:
        n = self.points
        return (index[..., 0] * n + index[..., 1]) * n + index[..., 2]
