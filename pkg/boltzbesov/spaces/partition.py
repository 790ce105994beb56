"""Dyadic partition of unity and the Littlewood-Paley blocks Delta_q, S_q.

The radial profiles are

    chi(r) = 1 for r <= 3/4, 0 for r >= 4/3, smooth in between
    phi(r) = chi(r/2) - chi(r)      (supported in 3/4 <= r <= 8/3)

On a finite lattice the top block ``q_max`` is the high-pass remainder
``1 - chi(2^-q_max xi)``, so the blocks sum to one exactly at every lattice
point, including corner frequencies beyond the last full annulus.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from boltzbesov.constants import (
    ANNULUS_OUTER_RADIUS,
    CHI_INNER_RADIUS,
    CHI_OUTER_RADIUS,
    MIN_LATTICE_POINTS,
)
from boltzbesov.errors import ConfigurationError, RangeError
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField

logger = logging.getLogger(__name__)


def _exp_ramp(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    up = _exp_ramp(t)
    down = _exp_ramp(1.0 - t)
    return up / (up + down)


def chi_profile(r: np.ndarray) -> np.ndarray:
    """Low-frequency profile chi(r)."""
    r = np.asarray(r, dtype=float)
    return 1.0 - smooth_step((r - CHI_INNER_RADIUS) / (CHI_OUTER_RADIUS - CHI_INNER_RADIUS))


def phi_profile(r: np.ndarray) -> np.ndarray:
    """Annulus profile phi(r) = chi(r/2) - chi(r)."""
    r = np.asarray(r, dtype=float)
    return chi_profile(r / 2.0) - chi_profile(r)


def max_valid_q(lattice: FrequencyLattice) -> int:
    """Largest q whose full annulus 2^q * [3/4, 8/3] fits under the axis Nyquist."""
    return int(math.floor(math.log2(lattice.nyquist / ANNULUS_OUTER_RADIUS)))


def minimal_points(half_length: float, q_max: int) -> int:
    """Smallest power-of-two N resolving blocks up to ``q_max``."""
    needed = 2.0 ** q_max * ANNULUS_OUTER_RADIUS * 2.0 * half_length / math.pi
    n = MIN_LATTICE_POINTS
    while n < needed:
        n *= 2
    return n


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    """Block multipliers evaluated on a lattice."""

    lattice: FrequencyLattice
    q_max: int
    chi: np.ndarray
    blocks: dict[int, np.ndarray] = field(repr=False)
    homogeneous_blocks: dict[int, np.ndarray] = field(repr=False)

    @property
    def block_range(self) -> range:
        """Nonhomogeneous indices -1..q_max."""
        return range(-1, self.q_max + 1)

    @property
    def homogeneous_range(self) -> range:
        """Homogeneous indices whose blocks meet the lattice."""
        return range(min(self.homogeneous_blocks), self.q_max + 1)

    def multiplier(self, q: int) -> np.ndarray:
        """Multiplier of Delta_q on the lattice (zero for q <= -2)."""
        if q > self.q_max:
            raise RangeError(f"block {q} exceeds q_max={self.q_max}")
        if q < -1:
            return np.zeros(self.lattice.shape)
        return self.blocks[q]

    def homogeneous_multiplier(self, q: int) -> np.ndarray:
        """Multiplier of the homogeneous block for any integer q <= q_max."""
        if q > self.q_max:
            raise RangeError(f"block {q} exceeds q_max={self.q_max}")
        return self.homogeneous_blocks.get(q, np.zeros(self.lattice.shape))

    def unity_residual(self) -> float:
        """Max pointwise |sum of block multipliers - 1| on the lattice."""
        total = sum(self.blocks.values())
        return float(np.max(np.abs(total - 1.0)))


def build_partition(lattice: FrequencyLattice, q_max: Optional[int] = None) -> DyadicPartition:
    """Evaluate chi and the dyadic blocks on a lattice.

    Args:
        lattice: Frequency lattice
        q_max: Top block (default: largest valid for the lattice)

    Returns:
        DyadicPartition with blocks -1..q_max

    Raises:
        ConfigurationError: Lattice too coarse for q_max
    """
    valid = max_valid_q(lattice)
    if q_max is None:
        q_max = valid
    if q_max < 0:
        raise ConfigurationError(f"q_max must be >= 0, got {q_max}")
    if q_max > valid:
        raise ConfigurationError(
            f"lattice N_x={lattice.points} cannot resolve q_max={q_max}; "
            f"need N_x >= {minimal_points(lattice.half_length, q_max)}"
        )

    r = lattice.magnitude
    chi = chi_profile(r)
    blocks = {-1: chi}
    for q in range(q_max):
        blocks[q] = phi_profile(r / 2.0**q)
    blocks[q_max] = 1.0 - chi_profile(r / 2.0**q_max)

    beyond = r > 2.0**q_max * ANNULUS_OUTER_RADIUS
    if np.any(beyond):
        logger.warning(
            "resolution: %d lattice frequencies lie beyond the block-%d annulus and are "
            "carried by the top remainder block",
            int(np.count_nonzero(beyond)),
            q_max,
        )

    # lowest homogeneous block with chi(2^-q xi) = 0 at every nonzero lattice frequency
    q_low = int(math.floor(math.log2(lattice.spacing / CHI_OUTER_RADIUS)))
    homogeneous = {q: phi_profile(r / 2.0**q) for q in range(q_low, q_max)}
    homogeneous[q_max] = np.where(r > 0, blocks[q_max], 0.0)

    return DyadicPartition(lattice, q_max, chi, blocks, homogeneous)


@lru_cache(maxsize=32)
def default_partition(lattice: FrequencyLattice) -> DyadicPartition:
    """Cached partition with the largest valid q_max."""
    return build_partition(lattice)


def _resolve(f: SpectralField, partition: Optional[DyadicPartition]) -> DyadicPartition:
    return partition if partition is not None else default_partition(f.lattice)


def _apply(f: SpectralField, multiplier: np.ndarray) -> SpectralField:
    shaped = multiplier.reshape(multiplier.shape + (1,) * len(f.tail))
    return f.with_coeffs(f.coeffs * shaped)


def dyadic_block(
    f: SpectralField, q: int, partition: Optional[DyadicPartition] = None
) -> SpectralField:
    """Delta_q f; q = -1 is the low-pass chi(D), q <= -2 gives zero.

    The top block q = q_max is the high-pass remainder (1 - chi(2^-q_max D)) f,
    so it also carries every lattice frequency beyond its annulus.

    Raises:
        RangeError: q > q_max
    """
    return _apply(f, _resolve(f, partition).multiplier(q))


def homogeneous_block(
    f: SpectralField, q: int, partition: Optional[DyadicPartition] = None
) -> SpectralField:
    """Homogeneous block; annihilates the zero mode for every q."""
    return _apply(f, _resolve(f, partition).homogeneous_multiplier(q))


def low_pass(
    f: SpectralField, q: int, partition: Optional[DyadicPartition] = None
) -> SpectralField:
    """S_q f = sum of Delta_q' f over q' <= q - 1.

    Raises:
        RangeError: q < 0
    """
    if q < 0:
        raise RangeError(f"S_q needs q >= 0, got {q}")
    part = _resolve(f, partition)
    top = min(q - 1, part.q_max)
    multiplier = sum(part.blocks[j] for j in range(-1, top + 1))
    return _apply(f, multiplier)


def block_decomposition(
    f: SpectralField, partition: Optional[DyadicPartition] = None, homogeneous: bool = False
) -> dict[int, SpectralField]:
    """All blocks of f keyed by q."""
    part = _resolve(f, partition)
    if homogeneous:
        return {q: homogeneous_block(f, q, part) for q in part.homogeneous_range}
    return {q: dyadic_block(f, q, part) for q in part.block_range}
