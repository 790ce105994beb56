"""Dyadic energy functionals E_q = E1_q + delta2 E2_q + delta3 E3_q."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from boltzbesov.constants import DEFAULT_DELTA2, DEFAULT_DELTA3
from boltzbesov.errors import ArgumentError
from boltzbesov.kinetics.macro import project_P
from boltzbesov.kinetics.moments import a_weights, b_weights, moment_field
from boltzbesov.spaces.lattice import SpectralField, gradient
from boltzbesov.spaces.partition import DyadicPartition, default_partition, dyadic_block


class EnergyFunctionalParams(BaseModel):
    """Weights of E2 and E3 with 0 < delta3 < delta2 < 1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    delta2: float = Field(DEFAULT_DELTA2, gt=0, lt=1)
    delta3: float = Field(DEFAULT_DELTA3, gt=0, lt=1)

    @model_validator(mode="after")
    def _ordered(self) -> "EnergyFunctionalParams":
        if not self.delta3 < self.delta2:
            raise ValueError("delta3 must be smaller than delta2")
        return self


@dataclass(frozen=True)
class EnergyParts:
    E1: float
    E2: float
    E3: float
    total: float

    def to_dict(self) -> dict:
        return {"E1": self.E1, "E2": self.E2, "E3": self.E3, "total": self.total}


@dataclass(frozen=True)
class BlockDecomposition:
    """Delta_q of the macro fields and of the micro part g2 = (I - P) g."""

    a: SpectralField
    b: SpectralField
    c: SpectralField
    g2: SpectralField


def _pair(f: SpectralField, g: SpectralField) -> float:
    """Real L^2_x inner product summed over any trailing axes."""
    return float(f.lattice.volume * np.real(np.vdot(f.coeffs, g.coeffs)))


def decompose_block(
    g: SpectralField,
    q: int,
    partition: Optional[DyadicPartition] = None,
) -> BlockDecomposition:
    """Project, then localize (a, b, c) and g2 to block q."""
    part = partition if partition is not None else default_partition(g.lattice)
    macro, pg = project_P(g)
    g2 = g - pg
    return BlockDecomposition(
        a=dyadic_block(macro.a_field, q, part),
        b=dyadic_block(macro.b_field, q, part),
        c=dyadic_block(macro.c_field, q, part),
        g2=dyadic_block(g2, q, part),
    )


def energy_Eq(
    g: SpectralField,
    q: int,
    params: Optional[EnergyFunctionalParams] = None,
    partition: Optional[DyadicPartition] = None,
) -> EnergyParts:
    """The three parts of the block-q energy functional and their weighted sum.

    E1_q = sum_i (B_i(Delta_q g2), d_i Delta_q c)
    E2_q = sum_ij (A_ij(Delta_q g2) + 2 Delta_q c delta_ij, d_j Delta_q b_i + d_i Delta_q b_j)
    E3_q = (Delta_q b, grad Delta_q a)
    """
    params = params or EnergyFunctionalParams()
    blocks = decompose_block(g, q, partition)
    grid = g.grid
    if grid is None:
        raise ArgumentError("energy functionals need a kinetic field")

    b_moment = moment_field(blocks.g2, b_weights(grid))
    e1 = _pair(b_moment, gradient(blocks.c))

    a_moment = moment_field(blocks.g2, a_weights(grid))
    a_moment = a_moment.with_coeffs(
        a_moment.coeffs + 2.0 * blocks.c.coeffs[..., None, None] * np.eye(3)
    )
    grad_b = gradient(blocks.b).coeffs  # [..., i, j] = d_j b_i
    sym = grad_b + np.swapaxes(grad_b, -1, -2)
    e2 = _pair(a_moment, a_moment.with_coeffs(sym))

    e3 = _pair(blocks.b, gradient(blocks.a))
    return EnergyParts(
        E1=e1, E2=e2, E3=e3, total=e1 + params.delta2 * e2 + params.delta3 * e3
    )


def energy_bound_terms(
    g: SpectralField, q: int, partition: Optional[DyadicPartition] = None
) -> float:
    """||grad Delta_q(a,b,c)|| + ||Delta_q(b,c)|| + ||grad Delta_q g2||_{L^2_v L^2_x}.

    |E_q(g)| is bounded by a constant times the square of this quantity.
    """
    blocks = decompose_block(g, q, partition)
    grad_macro = np.sqrt(
        sum(gradient(f).l2_norm() ** 2 for f in (blocks.a, blocks.b, blocks.c))
    )
    low = np.sqrt(blocks.b.l2_norm() ** 2 + blocks.c.l2_norm() ** 2)
    micro = gradient(blocks.g2).l2_norm() * np.sqrt(blocks.g2.grid.cell_volume)
    return float(grad_macro + low + micro)
