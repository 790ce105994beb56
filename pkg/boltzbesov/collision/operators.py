"""Strong-form collision operators Q, Gamma, L1 and L2 on the velocity grid.

The sigma-integral is discretized over configurations ``(i, j, node)``: output
cell ``v = v_i``, partner ``v* = v_j`` with ``j != i``, and one node of the
sigma-quadrature. A configuration carries the weight

    c = Phi(|v_i - v_j|) * w_node * h^3

and the interpolation stencils of its post-collision velocities ``v*'`` and
``v'``. Gain terms gather through the stencils, loss terms use the collision
frequency matrix ``Lambda_ij = sum over nodes of c``.
"""

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional, TypeVar

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from boltzbesov.collision.geometry import post_collision, relative_direction, sigma_vectors
from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.kernel import CollisionKernel, SigmaQuadrature, sigma_quadrature
from boltzbesov.constants import (
    CACHE_CONFIG_LIMIT,
    DEFAULT_CHUNK_ELEMENTS,
    DEFAULT_OP_BUDGET,
    DEFAULT_THREADS,
    FLOOR_FACTOR,
    FLOOR_MINIMUM,
    WORK_ELEMENTS,
)
from boltzbesov.errors import ArgumentError, BudgetExceededError
from boltzbesov.kinetics.maxwellian import invariants, kernel_basis, maxwellian, maxwellian_at
from boltzbesov.utils.parallel import chunk_ranges, parallel_map

logger = logging.getLogger(__name__)

R = TypeVar("R")


def _stencil_matrix(idx: np.ndarray, weights: np.ndarray, size: int) -> sp.csr_matrix:
    n, k = idx.shape
    return sp.csr_matrix(
        (weights.ravel(), idx.ravel(), np.arange(0, n * k + 1, k)), shape=(n, size)
    )


@dataclass
class ConfigurationChunk:
    """Collision configurations for a contiguous block of output cells."""

    size: int
    rows: np.ndarray
    partners: np.ndarray
    weights: np.ndarray
    panel: np.ndarray
    star_idx: np.ndarray
    star_w: np.ndarray
    prime_idx: np.ndarray
    prime_w: np.ndarray
    sqrt_mu_prime: np.ndarray

    def __len__(self) -> int:
        return self.rows.size

    @cached_property
    def s_star(self) -> sp.csr_matrix:
        """Evaluates grid functions at v*' (configurations x M)."""
        return _stencil_matrix(self.star_idx, self.star_w, self.size)

    @cached_property
    def s_prime(self) -> sp.csr_matrix:
        """Evaluates grid functions at v' (configurations x M)."""
        return _stencil_matrix(self.prime_idx, self.prime_w, self.size)

    @cached_property
    def scatter(self) -> sp.csr_matrix:
        """Sums configuration values into their output cells (M x configurations)."""
        n = len(self)
        return sp.csr_matrix((np.ones(n), (self.rows, np.arange(n))), shape=(self.size, n))


def build_chunk(
    grid: VelocityGrid, kernel: CollisionKernel, quadrature: SigmaQuadrature, rows: slice
) -> ConfigurationChunk:
    """Enumerate every configuration whose output cell lies in ``rows``."""
    m = grid.size
    v = grid.velocities
    i = np.repeat(np.arange(rows.start, rows.stop), m)
    j = np.tile(np.arange(m), rows.stop - rows.start)
    keep = i != j
    i, j = i[keep], j[keep]

    r, k_hat = relative_direction(v[i], v[j])
    theta, psi, w = quadrature.flat
    sigma = sigma_vectors(k_hat, theta, psi)
    v_prime, v_star_prime = post_collision(v[i][:, None, :], v[j][:, None, :], sigma)
    v_prime = v_prime.reshape(-1, 3)
    v_star_prime = v_star_prime.reshape(-1, 3)

    nodes = w.size
    star_idx, star_w = grid.stencil(v_star_prime, kernel.interpolation)
    prime_idx, prime_w = grid.stencil(v_prime, kernel.interpolation)
    return ConfigurationChunk(
        size=m,
        rows=np.repeat(i, nodes),
        partners=np.repeat(j, nodes),
        weights=(kernel.phi(r)[:, None] * w[None, :]).ravel() * grid.cell_volume,
        panel=np.tile(quadrature.flat_panel, i.size),
        star_idx=star_idx,
        star_w=star_w,
        prime_idx=prime_idx,
        prime_w=prime_w,
        sqrt_mu_prime=maxwellian_at(v_prime, 0.5),
    )


FLOOR_NAMES = ("equilibrium", "moments", "kernel", "drift")


@dataclass(frozen=True)
class QuadratureFloor:
    """Noise of the raw quadrature at the exact equilibrium, one value per identity.

    ``equilibrium``, ``moments`` and ``kernel`` are relative to the loss term
    (Lambda mu) mu that the gain has to cancel; ``drift`` is max |Q(mu, mu)|
    of the conservative operator, in units of f.
    """

    equilibrium: float
    moments: float
    kernel: float
    drift: float

    def tolerance(self, name: str) -> float:
        """epsilon_quad of one identity: FLOOR_FACTOR times its floor."""
        return FLOOR_FACTOR * max(getattr(self, name), FLOOR_MINIMUM)

    def to_dict(self) -> dict:
        return {
            "floor": {name: getattr(self, name) for name in FLOOR_NAMES},
            "epsilon_quad": {name: self.tolerance(name) for name in FLOOR_NAMES},
        }


@dataclass(frozen=True)
class LinearizedMatrices:
    """Dense matrices of L1, L2 and the L^2_v projector onto ker L."""

    l1: np.ndarray
    l2: np.ndarray
    l2_raw: np.ndarray
    projector: np.ndarray

    @property
    def full(self) -> np.ndarray:
        return self.l1 + self.l2


class CollisionOperator:
    """Collision quadrature bound to one grid and kernel.

    Configurations are generated in chunks of output rows. They are kept in
    memory when the whole sweep is below ``CACHE_CONFIG_LIMIT`` and rebuilt
    on every sweep otherwise.
    """

    def __init__(
        self,
        grid: VelocityGrid,
        kernel: CollisionKernel,
        threads: int = DEFAULT_THREADS,
        op_budget: float = DEFAULT_OP_BUDGET,
        chunk_elements: int = DEFAULT_CHUNK_ELEMENTS,
    ):
        self.grid = grid
        self.kernel = kernel
        self.threads = threads
        self.op_budget = op_budget
        self.chunk_elements = chunk_elements
        self.quadrature = sigma_quadrature(kernel, extrapolate=True)
        self.mu = maxwellian(grid)
        self.sqrt_mu = np.sqrt(self.mu)
        self._chunks: Optional[list[ConfigurationChunk]] = None
        self._matrices: dict[bool, LinearizedMatrices] = {}
        self._floor: Optional[QuadratureFloor] = None

    # -- configuration sweep -------------------------------------------------

    @property
    def n_configurations(self) -> int:
        m = self.grid.size
        return m * (m - 1) * self.quadrature.size

    @property
    def operation_count(self) -> int:
        """N_v^6 * n_sigma pair-node evaluations of one sweep."""
        return self.grid.size**2 * self.quadrature.size

    def check_budget(self) -> None:
        """Raise BudgetExceededError when a sweep exceeds ``op_budget``."""
        if self.operation_count > self.op_budget:
            raise BudgetExceededError(
                f"collision sweep needs {self.operation_count:.3e} pair-node evaluations, "
                f"budget is {self.op_budget:.3e}; reduce points_per_axis, n_theta or n_psi"
            )

    def row_slices(self) -> list[slice]:
        m = self.grid.size
        per_row = max(1, (m - 1) * self.quadrature.size)
        return list(chunk_ranges(m, max(1, self.chunk_elements // per_row)))

    def _build(self, rows: slice) -> ConfigurationChunk:
        return build_chunk(self.grid, self.kernel, self.quadrature, rows)

    def chunks(self) -> Iterator[ConfigurationChunk]:
        """Iterate over all configuration chunks."""
        self.check_budget()
        if self._chunks is None and self.n_configurations <= CACHE_CONFIG_LIMIT:
            logger.debug(f"caching {self.n_configurations} collision configurations")
            self._chunks = parallel_map(self._build, self.row_slices(), self.threads)
        if self._chunks is not None:
            yield from self._chunks
        else:
            for rows in self.row_slices():
                yield self._build(rows)

    def reduce(self, fn: Callable[[ConfigurationChunk], R]) -> R:
        """Sum ``fn(chunk)`` over all chunks, ``threads`` chunks at a time."""
        self.check_budget()
        if self._chunks is None and self.n_configurations <= CACHE_CONFIG_LIMIT:
            list(self.chunks())

        work: list = list(self._chunks) if self._chunks is not None else self.row_slices()

        def task(item: ConfigurationChunk | slice) -> R:
            return fn(item if isinstance(item, ConfigurationChunk) else self._build(item))

        total = None
        step = max(1, self.threads)
        for start in range(0, len(work), step):
            for part in parallel_map(task, work[start : start + step], self.threads):
                total = part if total is None else total + part
        return total  # type: ignore[return-value]

    def difference_weights(self, chunk: ConfigurationChunk) -> np.ndarray:
        """Configuration weights for difference forms.

        The Richardson panel is kept only when nu >= 1; otherwise the
        difference forms are integrated down to theta_min.
        """
        if self.kernel.nu >= 1:
            return chunk.weights
        return np.where(chunk.panel < 0, 0.0, chunk.weights)

    def tail_weights(self, chunk: ConfigurationChunk) -> np.ndarray:
        """Weights whose sum estimates the truncated theta < theta_min part.

        For nu < 1 that is the innermost panel scaled by 1/(2^p - 1); for
        nu >= 1 it is the Richardson correction itself.
        """
        if self.kernel.nu >= 1:
            return np.where(chunk.panel < 0, chunk.weights, 0.0)
        p = self.kernel.extrapolation_order
        return np.where(chunk.panel == 0, chunk.weights, 0.0) / (2.0**p - 1.0)

    # -- strong form ---------------------------------------------------------

    @cached_property
    def loss_matrix(self) -> np.ndarray:
        """Lambda_ij = Phi(|v_i - v_j|) h^3 sum(w), zero on the diagonal."""
        v = self.grid.velocities
        r = cdist(v, v)
        np.fill_diagonal(r, 1.0)
        lam = self.kernel.phi(r) * self.quadrature.weights.sum() * self.grid.cell_volume
        np.fill_diagonal(lam, 0.0)
        return lam

    @cached_property
    def moment_matrix(self) -> np.ndarray:
        """Discrete moments against {1, v, |v|^2}, shape (5, M)."""
        return invariants(self.grid) * self.grid.cell_volume

    @cached_property
    def _conservation_gram(self) -> tuple:
        k = self.moment_matrix @ (self.mu[:, None] * invariants(self.grid).T)
        return scipy.linalg.lu_factor(k)

    def project(self, q: np.ndarray) -> np.ndarray:
        """Remove the collision-invariant moments of ``q`` along mu-weighted invariants.

        The result has vanishing discrete mass, momentum and energy.
        """
        flat = q.reshape(-1, self.grid.size)
        coef = scipy.linalg.lu_solve(self._conservation_gram, self.moment_matrix @ flat.T)
        correction = (self.mu[:, None] * (invariants(self.grid).T @ coef)).T
        return (flat - correction).reshape(q.shape)

    def _as_batch(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape[-1] != self.grid.size:
            raise ArgumentError(
                f"velocity field has {f.shape[-1]} values, grid has {self.grid.size}"
            )
        return f.reshape(-1, self.grid.size)

    def gain(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """sum over configurations of c f(v*') g(v'), batched over leading axes."""
        shape = np.broadcast_shapes(np.shape(f), np.shape(g))
        F = self._as_batch(np.broadcast_to(f, shape))
        G = self._as_batch(np.broadcast_to(g, shape))

        def contribution(chunk: ConfigurationChunk) -> np.ndarray:
            out = np.empty((self.grid.size, F.shape[0]))
            batch = max(1, WORK_ELEMENTS // max(1, len(chunk)))
            for cols in chunk_ranges(F.shape[0], batch):
                fs = chunk.s_star @ F[cols].T
                gp = chunk.s_prime @ G[cols].T
                out[:, cols] = chunk.scatter @ (chunk.weights[:, None] * fs * gp)
            return out

        return self.reduce(contribution).T.reshape(shape)

    def loss(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """(Lambda f) g, the loss term of Q(f, g)."""
        shape = np.broadcast_shapes(np.shape(f), np.shape(g))
        F = self._as_batch(np.broadcast_to(f, shape))
        G = self._as_batch(np.broadcast_to(g, shape))
        return ((F @ self.loss_matrix.T) * G).reshape(shape)

    def collide(self, f: np.ndarray, g: np.ndarray, conservative: bool = True) -> np.ndarray:
        """Q(f, g) on the grid; fields may carry leading batch axes.

        Args:
            f: Partner distribution (evaluated at v* and v*')
            g: Distribution evaluated at v and v'
            conservative: Apply the moment projection

        Returns:
            Q(f, g) with the broadcast shape of the inputs
        """
        shape = np.broadcast_shapes(np.shape(f), np.shape(g))
        F = self._as_batch(np.broadcast_to(f, shape))
        G = self._as_batch(np.broadcast_to(g, shape))
        q = self.gain(F, G) - self.loss(F, G)
        if conservative:
            q = self.project(q)
        return q.reshape(shape)

    def gamma(self, f: np.ndarray, g: np.ndarray, conservative: bool = True) -> np.ndarray:
        """Gamma(f, g) = mu^(-1/2) Q(mu^(1/2) f, mu^(1/2) g)."""
        q = self.collide(self.sqrt_mu * f, self.sqrt_mu * g, conservative)
        return q / self.sqrt_mu

    # -- linearization -------------------------------------------------------

    def _assemble(self, chunk: ConfigurationChunk, factor: np.ndarray, at_star: bool) -> np.ndarray:
        idx, w = (chunk.star_idx, chunk.star_w) if at_star else (chunk.prime_idx, chunk.prime_w)
        k = idx.shape[1]
        m = self.grid.size
        values = (chunk.weights * factor)[:, None] * w
        flat = np.repeat(chunk.rows, k) * m + idx.ravel()
        return np.bincount(flat, weights=values.ravel(), minlength=m * m).reshape(m, m)

    @cached_property
    def kernel_projector(self) -> np.ndarray:
        """Orthogonal projector in L^2_v onto span{mu^(1/2), v mu^(1/2), |v|^2 mu^(1/2)}."""
        basis = kernel_basis(self.grid)
        h3 = self.grid.cell_volume
        gram = h3 * basis @ basis.T
        return h3 * basis.T @ np.linalg.solve(gram, basis)

    @cached_property
    def _raw_linear(self) -> tuple[np.ndarray, np.ndarray]:
        mu = self.mu

        def gains(chunk: ConfigurationChunk) -> np.ndarray:
            mu_star = chunk.s_star @ mu
            mu_prime = chunk.s_prime @ mu
            return np.stack(
                [self._assemble(chunk, mu_star, False), self._assemble(chunk, mu_prime, True)]
            )

        gain1, gain2 = self.reduce(gains)
        lam = self.loss_matrix
        b1 = gain1 - np.diag(lam @ mu)
        b2 = gain2 - mu[:, None] * lam
        pi = self.project(np.eye(self.grid.size)).T
        inv = 1.0 / self.sqrt_mu
        l1 = -inv[:, None] * (pi @ b1) * self.sqrt_mu[None, :]
        l2_raw = -inv[:, None] * (pi @ b2) * self.sqrt_mu[None, :]
        return l1, l2_raw

    def linear_matrices(self, closure: bool = True) -> LinearizedMatrices:
        """Dense L1 and L2 on the grid.

        L1 g = -Gamma(mu^(1/2), g) and L2_raw g = -Gamma(g, mu^(1/2)) exactly
        as the bilinear quadrature gives them. With ``closure`` the kernel
        part is rebalanced, L2 = L2_raw - (L1 + L2_raw) P, so that L1 + L2
        vanishes on ker L.
        """
        if closure in self._matrices:
            return self._matrices[closure]
        l1, l2_raw = self._raw_linear
        projector = self.kernel_projector
        l2 = l2_raw - (l1 + l2_raw) @ projector if closure else l2_raw
        matrices = LinearizedMatrices(l1=l1, l2=l2, l2_raw=l2_raw, projector=projector)
        self._matrices[closure] = matrices
        return matrices

    def linearized(self, g: np.ndarray, closure: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """(L1 g, L2 g) over the last axis of ``g`` (real or complex)."""
        mats = self.linear_matrices(closure)
        return g @ mats.l1.T, g @ mats.l2.T

    def relative_moments(self, q: np.ndarray, scale: np.ndarray) -> float:
        """max over the invariants phi of |(q, phi)| / (|scale|, |phi|)."""
        num = np.abs(self.moment_matrix @ q)
        den = np.abs(self.moment_matrix) @ np.abs(scale)
        return float(np.max(np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)))

    def kernel_residuals(self, closure: bool = False) -> np.ndarray:
        """||mu^(1/2) L e|| / ||(Lambda mu) mu^(1/2) e|| for each ker L basis element e.

        The first entry is the mass direction e = mu^(1/2), where
        mu^(1/2) L e = -2 Q(mu, mu).
        """
        full = self.linear_matrices(closure).full
        frequency = self.loss_matrix @ self.mu
        return np.array(
            [
                float(
                    self.grid.norm(self.sqrt_mu * (full @ e))
                    / self.grid.norm(frequency * self.sqrt_mu * e)
                )
                for e in kernel_basis(self.grid)
            ]
        )

    def floor(self) -> QuadratureFloor:
        """Per-identity noise floors of the raw quadrature, evaluated on mu itself."""
        if self._floor is None:
            mu = self.mu
            raw = self.collide(mu, mu, conservative=False)
            loss = self.loss(mu, mu)
            self._floor = QuadratureFloor(
                equilibrium=float(self.grid.norm(raw) / self.grid.norm(loss)),
                moments=self.relative_moments(raw, loss),
                kernel=float(self.kernel_residuals()[0]),
                drift=float(np.max(np.abs(self.project(raw)))),
            )
            logger.info(
                f"quadrature floor on N_v={self.grid.points}: "
                + ", ".join(f"{k}={v:.3e}" for k, v in self._floor.to_dict()["floor"].items())
            )
        return self._floor

    def describe(self) -> dict:
        """Header block for reports."""
        return {
            "kernel": self.kernel.describe(),
            "velocity_grid": {"half_width": self.grid.half_width, "points": self.grid.points},
            "sigma_nodes": self.quadrature.size,
            "configurations": self.n_configurations,
        }


@lru_cache(maxsize=8)
def operator_for(
    grid: VelocityGrid,
    kernel: CollisionKernel,
    threads: int = DEFAULT_THREADS,
    op_budget: float = DEFAULT_OP_BUDGET,
) -> CollisionOperator:
    """Shared operator per (grid, kernel)."""
    return CollisionOperator(grid, kernel, threads=threads, op_budget=op_budget)


def collide_Q(
    f: np.ndarray, g: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid
) -> np.ndarray:
    """Q(f, g) by strong-form quadrature with trilinear off-grid values."""
    return operator_for(grid, kernel).collide(f, g)


def gamma_op(
    f: np.ndarray, g: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid
) -> np.ndarray:
    """Gamma(f, g) = mu^(-1/2) Q(mu^(1/2) f, mu^(1/2) g)."""
    return operator_for(grid, kernel).gamma(f, g)


def linearized_L(
    g: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid
) -> tuple[np.ndarray, np.ndarray]:
    """(L1 g, L2 g) with L1 g = -Gamma(mu^(1/2), g), L2 g = -Gamma(g, mu^(1/2))."""
    return operator_for(grid, kernel).linearized(g)
