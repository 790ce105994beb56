"""Bony paraproduct decomposition fg = T_f g + T_g f + R(f, g)."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from boltzbesov.spaces.lattice import SpectralField, check_compatible
from boltzbesov.spaces.partition import DyadicPartition, block_decomposition, default_partition


@dataclass
class BonyParts:
    """The two paraproducts and the remainder."""

    paraproduct_fg: SpectralField  # T_f g, low frequencies of f against Delta_j g
    paraproduct_gf: SpectralField  # T_g f
    remainder: SpectralField

    def total(self) -> SpectralField:
        return self.paraproduct_fg + self.paraproduct_gf + self.remainder


def _physical_blocks(f: SpectralField, partition: DyadicPartition) -> dict[int, np.ndarray]:
    return {q: b.to_physical(real=False) for q, b in block_decomposition(f, partition).items()}


def paraproduct_terms(
    f: SpectralField, g: SpectralField, partition: Optional[DyadicPartition] = None
) -> dict[int, SpectralField]:
    """The summands S_{j-1} f * Delta_j g of T_f g, keyed by j."""
    check_compatible(f, g)
    part = partition if partition is not None else default_partition(f.lattice)
    fb = _physical_blocks(f, part)
    gb = _physical_blocks(g, part)
    terms = {}
    low = np.zeros_like(fb[-1])
    for j in range(1, part.q_max + 1):
        low = low + fb[j - 2]
        terms[j] = SpectralField.from_physical(low * gb[j], f.lattice, f.grid)
    return terms


def bony_decompose(
    f: SpectralField, g: SpectralField, partition: Optional[DyadicPartition] = None
) -> BonyParts:
    """Split the pointwise product fg by relative block size.

    Args:
        f: First factor
        g: Second factor (same lattice and velocity grid)
        partition: Dyadic partition (default for the lattice if omitted)

    Returns:
        BonyParts whose total reproduces fg

    Raises:
        ArgumentError: Mismatched lattices or grids
    """
    check_compatible(f, g)
    part = partition if partition is not None else default_partition(f.lattice)
    fb = _physical_blocks(f, part)
    gb = _physical_blocks(g, part)
    qs = list(part.block_range)

    t_fg = np.zeros_like(fb[-1])
    t_gf = np.zeros_like(fb[-1])
    rem = np.zeros_like(fb[-1])
    for i in qs:
        for j in qs:
            product = fb[i] * gb[j]
            if j - i >= 2:
                t_fg += product
            elif i - j >= 2:
                t_gf += product
            else:
                rem += product

    def wrap(values: np.ndarray) -> SpectralField:
        return SpectralField.from_physical(values, f.lattice, f.grid)

    return BonyParts(wrap(t_fg), wrap(t_gf), wrap(rem))
