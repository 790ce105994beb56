"""Macro-micro decomposition g = Pg + (I - P)g."""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
import scipy.linalg

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.constants import GRAM_CONDITION_LIMIT
from boltzbesov.errors import ArgumentError, NumericalError
from boltzbesov.kinetics.maxwellian import kernel_basis
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField


@dataclass(frozen=True)
class MacroFields:
    """Coefficients (a, b, c) of Pg = [a + v.b + |v|^2 c] mu^(1/2).

    For kinetic spectral fields the arrays hold Fourier coefficients over
    ``lattice``; for plain velocity fields they hold values and ``lattice``
    is None.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lattice: Optional[FrequencyLattice] = None

    @classmethod
    def from_stacked(
        cls, coef: np.ndarray, lattice: Optional[FrequencyLattice] = None
    ) -> "MacroFields":
        return cls(a=coef[..., 0], b=coef[..., 1:4], c=coef[..., 4], lattice=lattice)

    def stacked(self) -> np.ndarray:
        """(a, b_1, b_2, b_3, c) along a trailing axis of length 5."""
        return np.concatenate([self.a[..., None], self.b, self.c[..., None]], axis=-1)

    def _field(self, values: np.ndarray) -> SpectralField:
        if self.lattice is None:
            raise ArgumentError("macro fields of a velocity field have no x-dependence")
        return SpectralField(values, self.lattice)

    @property
    def a_field(self) -> SpectralField:
        return self._field(self.a)

    @property
    def b_field(self) -> SpectralField:
        return self._field(self.b)

    @property
    def c_field(self) -> SpectralField:
        return self._field(self.c)


@lru_cache(maxsize=16)
def _gram_factor(grid: VelocityGrid) -> tuple:
    basis = kernel_basis(grid)
    gram = grid.cell_volume * basis @ basis.T
    condition = float(np.linalg.cond(gram))
    if condition > GRAM_CONDITION_LIMIT:
        raise NumericalError(
            f"macro Gram matrix has condition number {condition:.3e} on N_v={grid.points}; "
            "refine the velocity grid",
            condition_number=condition,
        )
    return scipy.linalg.cho_factor(gram)


def macro_coefficients(g: np.ndarray, grid: VelocityGrid) -> np.ndarray:
    """Solve the 5x5 Gram system per leading index; result (..., 5)."""
    factor = _gram_factor(grid)
    rhs = np.tensordot(g, kernel_basis(grid), axes=([-1], [1])) * grid.cell_volume
    flat = rhs.reshape(-1, 5).T
    coef = scipy.linalg.cho_solve(factor, flat)
    return coef.T.reshape(rhs.shape)


def reconstruct(macro: MacroFields, grid: VelocityGrid) -> np.ndarray:
    """[a + v.b + |v|^2 c] mu^(1/2) over a trailing velocity axis."""
    return np.tensordot(macro.stacked(), kernel_basis(grid), axes=([-1], [0]))


def project_P(
    g: Union[SpectralField, np.ndarray], grid: Optional[VelocityGrid] = None
) -> tuple[MacroFields, Union[SpectralField, np.ndarray]]:
    """Orthogonal projection onto ker L in the discrete L^2_v inner product.

    Args:
        g: Kinetic spectral field, or velocity field(s) with the velocity axis last
        grid: Velocity grid, required for plain arrays

    Returns:
        (MacroFields, Pg) with Pg of the same kind as ``g``

    Raises:
        NumericalError: Gram matrix condition number above the limit
    """
    if isinstance(g, SpectralField):
        if g.grid is None:
            raise ArgumentError("project_P needs a kinetic field")
        coef = macro_coefficients(g.coeffs, g.grid)
        macro = MacroFields.from_stacked(coef, g.lattice)
        return macro, g.with_coeffs(reconstruct(macro, g.grid))
    if grid is None:
        raise ArgumentError("project_P on a velocity array needs its grid")
    macro = MacroFields.from_stacked(macro_coefficients(np.asarray(g), grid))
    return macro, reconstruct(macro, grid)


def micro_part(g: SpectralField) -> SpectralField:
    """(I - P) g."""
    _, pg = project_P(g)
    return g - pg
