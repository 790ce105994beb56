"""The triple norm, the dissipation functional and weighted velocity norms."""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft
import scipy.sparse as sp

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.kernel import CollisionKernel
from boltzbesov.collision.operators import ConfigurationChunk, CollisionOperator, operator_for

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TripleNormReport:
    """Squared triple norm split into its two parts.

    ``tail`` estimates the part of J1 + J2 below theta_min that the
    quadrature leaves out.
    """

    J1: float
    J2: float
    total: float
    tail: float = 0.0

    @classmethod
    def from_parts(cls, j1: float, j2: float, tail: float = 0.0) -> "TripleNormReport":
        j1, j2 = max(j1, 0.0), max(j2, 0.0)
        return cls(J1=j1, J2=j2, total=j1 + j2, tail=abs(tail))

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.total))

    def to_dict(self) -> dict:
        return {"J1": self.J1, "J2": self.J2, "total": self.total, "tail": self.tail}


def _j1_terms(op: CollisionOperator, chunk: ConfigurationChunk, f: np.ndarray) -> np.ndarray:
    diff = chunk.s_prime @ f - f[chunk.rows]
    return op.mu[chunk.partners] * diff**2


def _j2_terms(op: CollisionOperator, chunk: ConfigurationChunk, f: np.ndarray) -> np.ndarray:
    jump = chunk.sqrt_mu_prime - op.sqrt_mu[chunk.rows]
    return f[chunk.partners] ** 2 * jump**2


def triple_norm(f: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid) -> TripleNormReport:
    """|||f|||^2 = J1 + J2 by direct quadrature.

    J1 = sum of B mu_* (f' - f)^2 and J2 = sum of B f_*^2 (mu'^(1/2) - mu^(1/2))^2,
    where f' is interpolated and mu'^(1/2) is evaluated exactly.
    """
    op = operator_for(grid, kernel)
    f = np.real(np.asarray(f)).astype(float)

    def parts(chunk: ConfigurationChunk) -> np.ndarray:
        j1 = _j1_terms(op, chunk, f)
        j2 = _j2_terms(op, chunk, f)
        w, t = op.difference_weights(chunk), op.tail_weights(chunk)
        return np.array([w @ j1, w @ j2, t @ (j1 + j2)])

    j1, j2, tail = op.reduce(parts)
    return TripleNormReport.from_parts(float(j1), float(j2), float(tail))


def dissipation_D(
    f: np.ndarray, g: np.ndarray, kernel: CollisionKernel, grid: VelocityGrid
) -> float:
    """D(f, g) = sum of B f_* (g - g')^2.

    Negative values of ``f`` are reported but the sum is taken anyway.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if np.any(f < 0):
        logger.warning(f"dissipation functional evaluated with min f = {f.min():.3e} < 0")
    op = operator_for(grid, kernel)

    def terms(chunk: ConfigurationChunk) -> float:
        diff = g[chunk.rows] - chunk.s_prime @ g
        return float(op.difference_weights(chunk) @ (f[chunk.partners] * diff**2))

    return float(op.reduce(terms))


@dataclass(frozen=True)
class TripleNormForm:
    """|||f|||^2 as a quadratic form on the grid: f^T (A1 + diag(a2)) f."""

    j1_matrix: np.ndarray
    j2_diagonal: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.j1_matrix + np.diag(self.j2_diagonal)

    def parts(self, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(J1, J2) over the last axis of ``f`` (complex allowed)."""
        j1 = np.real(np.einsum("...m,mn,...n->...", np.conj(f), self.j1_matrix, f))
        j2 = np.sum(self.j2_diagonal * np.abs(f) ** 2, axis=-1)
        return np.maximum(j1, 0.0), j2

    def squared(self, f: np.ndarray) -> np.ndarray:
        j1, j2 = self.parts(f)
        return j1 + j2

    def norm(self, f: np.ndarray) -> np.ndarray:
        return np.sqrt(self.squared(f))

    def report(self, f: np.ndarray) -> TripleNormReport:
        j1, j2 = self.parts(f)
        return TripleNormReport.from_parts(float(j1), float(j2))


@lru_cache(maxsize=8)
def triple_norm_form(grid: VelocityGrid, kernel: CollisionKernel) -> TripleNormForm:
    """Assemble the triple-norm quadratic form from the configuration sweep."""
    op = operator_for(grid, kernel)
    m = grid.size

    def assemble(chunk: ConfigurationChunk) -> np.ndarray:
        n = len(chunk)
        w = op.difference_weights(chunk)
        select = sp.csr_matrix((np.ones(n), (np.arange(n), chunk.rows)), shape=(n, m))
        diff = chunk.s_prime - select
        a1 = (diff.T @ sp.diags(w * op.mu[chunk.partners]) @ diff).toarray()
        jump = chunk.sqrt_mu_prime - op.sqrt_mu[chunk.rows]
        a2 = np.bincount(chunk.partners, weights=w * jump**2, minlength=m)
        return np.concatenate([a1, a2[None, :]])

    total = op.reduce(assemble)
    return TripleNormForm(j1_matrix=total[:m], j2_diagonal=total[m])


def weighted_l2_norm(
    f: np.ndarray, grid: VelocityGrid, ell: float = 0.0, mu_power: float = 0.0
) -> np.ndarray:
    """||<v>^ell mu^mu_power f||_{L^2_v} over the last axis."""
    weight = grid.japanese_bracket**ell
    if mu_power:
        weight = weight * (2.0 * np.pi) ** (-1.5 * mu_power) * np.exp(
            -0.5 * mu_power * grid.speed_squared
        )
    return grid.norm(weight * f)


def weighted_sobolev_norm(
    f: np.ndarray, grid: VelocityGrid, order: float, ell: float = 0.0
) -> np.ndarray:
    """||<D_v>^order (<v>^ell f)||_{L^2_v}, spectral in v on the periodized box."""
    weighted = np.asarray(grid.japanese_bracket**ell * f)
    lead = weighted.shape[:-1]
    cube = weighted.reshape(lead + grid.shape)
    spectrum = scipy.fft.fftn(cube, axes=(-3, -2, -1), norm="ortho").reshape(lead + (grid.size,))
    symbol = (1.0 + np.sum(grid.frequencies**2, axis=1)) ** order
    return np.sqrt(grid.cell_volume * np.sum(symbol * np.abs(spectrum) ** 2, axis=-1))
