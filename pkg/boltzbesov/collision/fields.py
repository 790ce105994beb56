"""Collision operators applied pointwise in x to kinetic spectral fields."""

from typing import Optional

import numpy as np

from boltzbesov.collision.operators import CollisionOperator
from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.lattice import SpectralField, check_compatible


def _check_grid(op: CollisionOperator, g: SpectralField) -> None:
    if g.grid != op.grid:
        raise ArgumentError("field and collision operator live on different velocity grids")


def apply_matrix(matrix: np.ndarray, g: SpectralField) -> SpectralField:
    """Apply a velocity matrix at every frequency (linear operators commute with the FFT)."""
    return g.with_coeffs(g.coeffs @ matrix.T)


def linear_field(op: CollisionOperator, g: SpectralField, closure: bool = True) -> SpectralField:
    """L g = L1 g + L2 g."""
    _check_grid(op, g)
    return apply_matrix(op.linear_matrices(closure).full, g)


def l1_field(op: CollisionOperator, g: SpectralField) -> SpectralField:
    _check_grid(op, g)
    return apply_matrix(op.linear_matrices().l1, g)


def gamma_field(
    op: CollisionOperator,
    f: SpectralField,
    g: Optional[SpectralField] = None,
    workers: int = 1,
) -> SpectralField:
    """Gamma(f, g) evaluated at every x-point (g defaults to f)."""
    g = f if g is None else g
    check_compatible(f, g)
    _check_grid(op, f)
    fx = f.to_physical(workers)
    gx = fx if g is f else g.to_physical(workers)
    values = op.gamma(fx, gx)
    return SpectralField.from_physical(values, f.lattice, f.grid, workers)
