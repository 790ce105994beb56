"""Besov, Chemin-Lerner and triple-norm Chemin-Lerner norms.

Block norms follow the Chemin-Lerner order: L^p in x innermost, then L^beta
in v, then L^alpha in time, and only then the weighted l^r sum over blocks.
For p = 2 the x-norm is taken on the Fourier side (Parseval).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from boltzbesov.errors import ArgumentError
from boltzbesov.spaces.lattice import SpectralField
from boltzbesov.spaces.partition import (
    DyadicPartition,
    block_decomposition,
    default_partition,
)
from boltzbesov.state import Trajectory

INF = math.inf


@dataclass(frozen=True)
class NormParams:
    """Exponents of B^s_{p,r} and of the time / velocity Lebesgue norms."""

    s: float = 1.5
    p: float = 2.0
    r: float = 1.0
    alpha: float = INF
    beta: float = 2.0
    homogeneous: bool = False

    def __post_init__(self) -> None:
        for name in ("p", "r", "alpha", "beta"):
            value = getattr(self, name)
            if not 1.0 <= value <= INF:
                raise ArgumentError(f"{name} must lie in [1, inf], got {value}")


def lp_sum(values: np.ndarray, exponent: float, axis: int = 0) -> np.ndarray:
    """Discrete l^exponent norm along an axis."""
    values = np.abs(values)
    if exponent == INF:
        return np.max(values, axis=axis, initial=0.0)
    return np.sum(values**exponent, axis=axis) ** (1.0 / exponent)


def _x_norms(block: SpectralField, p: float) -> np.ndarray:
    """L^p_x norm per trailing index (vector tails are reduced pointwise first)."""
    lattice = block.lattice
    if block.tail == (3,) and block.grid is None:
        if p == 2:
            return np.array(
                math.sqrt(lattice.volume * float(np.sum(np.abs(block.coeffs) ** 2)))
            )
        values = np.sqrt(np.sum(block.to_physical() ** 2, axis=-1))
    elif p == 2:
        return np.sqrt(lattice.volume * np.sum(np.abs(block.coeffs) ** 2, axis=(0, 1, 2)))
    else:
        values = block.to_physical()
    flat = np.abs(values).reshape((-1,) + values.shape[3:])
    if p == INF:
        return np.max(flat, axis=0)
    return (lattice.dx**3 * np.sum(flat**p, axis=0)) ** (1.0 / p)


def block_norm(block: SpectralField, p: float = 2.0, beta: float = 2.0) -> float:
    """||block||_{L^beta_v L^p_x} (plain L^p_x for macroscopic fields)."""
    x_norms = _x_norms(block, p)
    if block.grid is None:
        return float(x_norms)
    if beta == INF:
        return float(np.max(x_norms, initial=0.0))
    return float((block.grid.cell_volume * np.sum(x_norms**beta)) ** (1.0 / beta))


def _resolve(f: SpectralField, partition: Optional[DyadicPartition]) -> DyadicPartition:
    return partition if partition is not None else default_partition(f.lattice)


def besov_block_norms(
    f: SpectralField, params: NormParams, partition: Optional[DyadicPartition] = None
) -> dict[int, float]:
    """Unweighted block norms ||Delta_q f||_{L^beta_v L^p_x} keyed by q."""
    blocks = block_decomposition(f, _resolve(f, partition), params.homogeneous)
    return {q: block_norm(b, params.p, params.beta) for q, b in blocks.items()}


def weighted_sum(per_block: dict[int, float], s: float, r: float) -> float:
    """l^r norm of (2^{qs} a_q)_q."""
    if not per_block:
        return 0.0
    qs = np.array(sorted(per_block))
    values = np.array([per_block[q] for q in qs]) * 2.0 ** (s * qs)
    return float(lp_sum(values, r))


def besov_norm(
    f: SpectralField, params: NormParams, partition: Optional[DyadicPartition] = None
) -> float:
    """Besov norm B^s_{p,r} (kinetic fields: the L~^beta_v(B^s_{p,r}) norm).

    The homogeneous flag sums the homogeneous blocks over the lattice's
    resolved range instead of q = -1..q_max.
    """
    return weighted_sum(besov_block_norms(f, params, partition), params.s, params.r)


def time_norm(values: np.ndarray, times: np.ndarray, alpha: float) -> float:
    """L^alpha over [t_0, t_end] by composite trapezoid (max for alpha = inf)."""
    values = np.abs(np.asarray(values, dtype=float))
    if alpha == INF:
        return float(np.max(values, initial=0.0))
    return float(trapezoid(values**alpha, times) ** (1.0 / alpha))


def _check_trajectory(traj: Trajectory, alpha: float) -> None:
    if len(traj) == 0:
        raise ArgumentError("empty trajectory")
    traj.validate(1 if alpha == INF else 2)


def chemin_lerner_norm(
    traj: Trajectory, params: NormParams, partition: Optional[DyadicPartition] = None
) -> float:
    """L~^alpha_T L~^beta_v(B^s_{p,r}): time and velocity norms taken per block.

    Raises:
        ArgumentError: Empty trajectory, non-increasing times, or a single
            snapshot with finite alpha
    """
    _check_trajectory(traj, params.alpha)
    part = _resolve(traj.fields[0], partition)
    times = np.asarray(traj.times)
    series = [besov_block_norms(g, params, part) for g in traj.fields]
    per_block = {
        q: time_norm(np.array([s[q] for s in series]), times, params.alpha) for q in series[0]
    }
    return weighted_sum(per_block, params.s, params.r)


def iterated_norm(
    traj: Trajectory, params: NormParams, partition: Optional[DyadicPartition] = None
) -> float:
    """L^alpha_T L^beta_v(B^s_{p,r}): the Besov norm in x first, per (t, v)."""
    _check_trajectory(traj, params.alpha)
    part = _resolve(traj.fields[0], partition)
    values = []
    for g in traj.fields:
        blocks = block_decomposition(g, part, params.homogeneous)
        qs = np.array(sorted(blocks))
        per_q = np.stack([np.atleast_1d(_x_norms(blocks[q], params.p)) for q in qs])
        besov_per_v = lp_sum(per_q * 2.0 ** (params.s * qs)[:, None], params.r)
        if g.grid is None:
            values.append(float(besov_per_v[0]))
        elif params.beta == INF:
            values.append(float(np.max(besov_per_v)))
        else:
            values.append(
                float((g.grid.cell_volume * np.sum(besov_per_v**params.beta)) ** (1 / params.beta))
            )
    return time_norm(np.array(values), np.asarray(traj.times), params.alpha)


def quadratic_form_x_norm(block: SpectralField, form: np.ndarray, r: float = 2.0) -> float:
    """|| |||block(x, .)||| ||_{L^r_x} for a velocity quadratic form ``form`` (M x M)."""
    if block.grid is None:
        raise ArgumentError("quadratic-form norms need a kinetic field")
    lattice = block.lattice
    if r == 2:
        c = block.coeffs.reshape(-1, block.grid.size)
        energy = np.real(np.einsum("km,mn,kn->", np.conj(c), form, c))
        return math.sqrt(max(lattice.volume * energy, 0.0))
    values = block.to_physical().reshape(-1, block.grid.size)
    pointwise = np.sqrt(np.maximum(np.einsum("km,mn,kn->k", values, form, values), 0.0))
    if r == INF:
        return float(np.max(pointwise))
    return float((lattice.dx**3 * np.sum(pointwise**r)) ** (1.0 / r))


def triple_chemin_lerner_norm(
    traj: Trajectory,
    form: np.ndarray,
    s: float = 1.5,
    p: float = 2.0,
    r: float = 2.0,
    homogeneous: bool = False,
    partition: Optional[DyadicPartition] = None,
) -> float:
    """Sum over q of 2^{qs} || |||Delta_q f||| ||_{L^p_T L^r_x}.

    ``form`` is the symmetric matrix of the squared triple norm on the
    velocity grid, see ``collision.norms.TripleNormForm.matrix``.
    """
    _check_trajectory(traj, p)
    part = _resolve(traj.fields[0], partition)
    times = np.asarray(traj.times)
    series = []
    for g in traj.fields:
        blocks = block_decomposition(g, part, homogeneous)
        series.append({q: quadratic_form_x_norm(b, form, r) for q, b in blocks.items()})
    per_block = {q: time_norm(np.array([v[q] for v in series]), times, p) for q in series[0]}
    return weighted_sum(per_block, s, 1.0)


def sup_norm(f: SpectralField) -> float:
    """max over x (and v) of |f|."""
    return float(np.max(np.abs(f.to_physical())))


def energy_norm(f: SpectralField, partition: Optional[DyadicPartition] = None) -> float:
    """||f||_{L~^2_v(B^{3/2}_{2,1})}, the size of initial data."""
    return besov_norm(f, NormParams(s=1.5, p=2.0, r=1.0, beta=2.0), partition)
