"""Maxwellian moment table, the moment functionals A_ij and B_i, and balance-law moments."""

from dataclasses import dataclass, field

import numpy as np

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.constants import MOMENT_REFERENCES
from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.maxwellian import maxwellian, maxwellian_power
from boltzbesov.spaces.lattice import SpectralField

MOMENT_COLUMNS = ["moment", "computed", "reference", "relative_error"]


@dataclass(frozen=True)
class MomentRow:
    name: str
    computed: float
    reference: float

    @property
    def relative_error(self) -> float:
        return abs(self.computed - self.reference) / abs(self.reference)


@dataclass
class MomentTable:
    """The eight Maxwellian moments on one grid against their exact values."""

    grid: VelocityGrid
    rows: list[MomentRow] = field(default_factory=list)

    @property
    def max_relative_error(self) -> float:
        return max((row.relative_error for row in self.rows), default=0.0)

    def row(self, name: str) -> MomentRow:
        return next(r for r in self.rows if r.name == name)

    def to_rows(self) -> list[list]:
        """Rows for the CSV export (see ``MOMENT_COLUMNS``)."""
        return [[r.name, r.computed, r.reference, r.relative_error] for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "half_width": self.grid.half_width,
            "points": self.grid.points,
            "max_relative_error": self.max_relative_error,
            "rows": [dict(zip(MOMENT_COLUMNS, r)) for r in self.to_rows()],
        }


def _integrands(grid: VelocityGrid) -> dict[str, np.ndarray]:
    v = grid.velocities
    v2 = grid.speed_squared
    v1_2, v2_2 = v[:, 0] ** 2, v[:, 1] ** 2
    return {
        "1": np.ones(grid.size),
        "|v_i|^2": v1_2,
        "|v|^2": v2,
        "|v_i|^2|v_j|^2": v1_2 * v2_2,
        "|v_i|^4": v1_2**2,
        "|v|^2|v_i|^2": v2 * v1_2,
        "|v|^4": v2**2,
        "|v|^4|v_i|^2": v2**2 * v1_2,
    }


def verify_moment_table(grid: VelocityGrid) -> MomentTable:
    """Integrate the eight moments of mu with the midpoint rule (i = 1, j = 2)."""
    mu = maxwellian(grid)
    integrands = _integrands(grid)
    rows = [
        MomentRow(name, float(grid.integrate(integrands[name] * mu)), reference)
        for name, reference in MOMENT_REFERENCES
    ]
    return MomentTable(grid=grid, rows=rows)


def a_weights(grid: VelocityGrid) -> np.ndarray:
    """(v_i v_j - delta_ij) mu^(1/2), shape (M, 3, 3)."""
    v = grid.velocities
    outer = v[:, :, None] * v[:, None, :] - np.eye(3)[None, :, :]
    return outer * maxwellian_power(grid, 0.5)[:, None, None]


def b_weights(grid: VelocityGrid) -> np.ndarray:
    """(1/10)(|v|^2 - 5) v_i mu^(1/2), shape (M, 3)."""
    factor = 0.1 * (grid.speed_squared - 5.0) * maxwellian_power(grid, 0.5)
    return grid.velocities * factor[:, None]


def moment_A(g: np.ndarray, grid: VelocityGrid) -> np.ndarray:
    """A_ij(g) over the last (velocity) axis; result has trailing shape (3, 3)."""
    return np.tensordot(g, a_weights(grid), axes=([-1], [0])) * grid.cell_volume


def moment_B(g: np.ndarray, grid: VelocityGrid) -> np.ndarray:
    """B_i(g) over the last (velocity) axis; result has trailing shape (3,)."""
    return np.tensordot(g, b_weights(grid), axes=([-1], [0])) * grid.cell_volume


def moment_field(g: SpectralField, weights: np.ndarray) -> SpectralField:
    """x-field of velocity moments h^3 sum_v weights(v) g(x, v).

    ``weights`` has shape (M,) + tail; the result carries that tail.
    """
    if g.grid is None:
        raise ArgumentError("velocity moments need a kinetic field")
    coeffs = np.tensordot(g.coeffs, weights, axes=([-1], [0])) * g.grid.cell_volume
    return SpectralField(coeffs, g.lattice, None)


def balance_weights(grid: VelocityGrid) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """(density weight, flux weight) of the three conservation laws for f = mu + mu^(1/2) g.

    Mass: (mu^(1/2), v mu^(1/2)); momentum: (v mu^(1/2), v (x) v mu^(1/2));
    energy: (|v|^2 mu^(1/2), |v|^2 v mu^(1/2)).
    """
    s = maxwellian_power(grid, 0.5)
    v = grid.velocities
    v2 = grid.speed_squared
    return {
        "mass": (s, v * s[:, None]),
        "momentum": (v * s[:, None], v[:, :, None] * v[:, None, :] * s[:, None, None]),
        "energy": (v2 * s, v * (v2 * s)[:, None]),
    }
