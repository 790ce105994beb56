"""Non-cutoff collision kernel B(v - v*, sigma) = Phi(|v - v*|) b(cos theta).

The angular part is the model power law b(theta) = K theta^(-2-nu) on the
folded range (0, pi/2]; the kinetic part is Phi(r) = r^gamma.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from boltzbesov.constants import (
    DEFAULT_KERNEL_AMPLITUDE,
    DEFAULT_N_PSI,
    DEFAULT_N_THETA,
    DEFAULT_THETA_MIN,
    INTERPOLATION_SCHEMES,
    KERNEL_PRESETS,
    SOFT_KERNEL,
)
from boltzbesov.errors import ConfigurationError, DomainError


class CollisionKernel(BaseModel):
    """Kernel parameters and the sigma-quadrature rule."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: float = Field(SOFT_KERNEL["gamma"], description="Kinetic exponent")
    nu: float = Field(SOFT_KERNEL["nu"], gt=0, lt=2, description="Angular singularity order")
    K: float = Field(DEFAULT_KERNEL_AMPLITUDE, gt=0, description="Singularity amplitude")
    theta_min: float = Field(DEFAULT_THETA_MIN, gt=0, lt=math.pi / 2, description="Angular cutoff")
    n_theta: int = Field(DEFAULT_N_THETA, ge=1, description="Gauss-Legendre nodes per panel")
    n_psi: int = Field(DEFAULT_N_PSI, ge=2, description="Azimuthal nodes (even)")
    interpolation: str = Field("trilinear", description="Off-grid interpolation scheme")

    @model_validator(mode="after")
    def _check_regime(self) -> "CollisionKernel":
        floor = max(-3.0, -1.5 - self.nu)
        if self.gamma <= floor:
            raise ValueError(f"gamma must exceed max(-3, -3/2 - nu) = {floor}")
        if self.n_psi % 2:
            raise ValueError("n_psi must be even for the psi -> psi + pi symmetry")
        if self.interpolation not in INTERPOLATION_SCHEMES:
            raise ValueError(f"interpolation must be one of {INTERPOLATION_SCHEMES}")
        return self

    @classmethod
    def preset(cls, name: str, **overrides: object) -> "CollisionKernel":
        """Build the soft or hard default parameter set."""
        if name not in KERNEL_PRESETS:
            raise ConfigurationError(f"unknown kernel preset '{name}'")
        return cls(**{**KERNEL_PRESETS[name], **overrides})

    @property
    def hard_potential(self) -> bool:
        """gamma + nu > 0."""
        return self.gamma + self.nu > 0

    @property
    def extrapolation_order(self) -> float:
        """Leading power of the truncation error in theta_min."""
        return 2.0 - self.nu

    def b(self, theta: np.ndarray) -> np.ndarray:
        """Angular function; see ``eval_b``."""
        return eval_b(theta, self)

    def phi(self, r: np.ndarray) -> np.ndarray:
        """Kinetic factor |v - v*|^gamma."""
        return np.asarray(r, dtype=float) ** self.gamma

    def describe(self) -> dict:
        """Report-header description of the kernel model."""
        return {
            **self.model_dump(),
            "angular_model": "b(theta) = K theta^(-2-nu) on (0, pi/2]",
            "kinetic_model": "Phi(r) = r^gamma",
        }


def eval_b(theta: np.ndarray | float, kernel: CollisionKernel) -> np.ndarray | float:
    """K theta^(-2-nu) for theta in (0, pi/2].

    Raises:
        DomainError: Any theta outside (0, pi/2]
    """
    t = np.asarray(theta, dtype=float)
    if np.any(t <= 0) or np.any(t > math.pi / 2 + 1e-15):
        raise DomainError("b is defined on (0, pi/2] only (folding already applied)")
    value = kernel.K * t ** (-2.0 - kernel.nu)
    return float(value) if np.ndim(theta) == 0 else value


def kernel_from_potential(p: float, **overrides: object) -> CollisionKernel:
    """Exponents of the inverse-power-law model with force exponent p > 2.

    gamma = (p - 5)/(p - 1), nu = 2/(p - 1); the angular function itself
    stays the model power law.
    """
    if p <= 2:
        raise DomainError(f"inverse-power exponent must exceed 2, got {p}")
    return CollisionKernel(gamma=(p - 5.0) / (p - 1.0), nu=2.0 / (p - 1.0), **overrides)


@dataclass(frozen=True)
class SigmaQuadrature:
    """Nodes of the sigma-integral in (theta, psi) with combined weights.

    ``weights[a, b]`` integrates ``b(theta) sin(theta) d theta d psi`` at node
    ``(thetas[a], psis[b])``. ``panel`` labels the geometric panel of every
    theta node: 0 is the innermost [theta_min, 2 theta_min] panel and -1 the
    Richardson panel [theta_min/2, theta_min] when extrapolation is on.
    """

    thetas: np.ndarray
    psis: np.ndarray
    weights: np.ndarray
    panel: np.ndarray
    extrapolated: bool

    @property
    def size(self) -> int:
        return self.weights.size

    @cached_property
    def flat(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(theta, psi, weight) per node, flattened."""
        theta, psi = np.meshgrid(self.thetas, self.psis, indexing="ij")
        return theta.ravel(), psi.ravel(), self.weights.ravel()

    @cached_property
    def flat_panel(self) -> np.ndarray:
        return np.repeat(self.panel, self.psis.size)


def panel_edges(theta_min: float) -> np.ndarray:
    """Geometric panels theta_min * 2^k, the last one clipped at pi/2."""
    edges = [theta_min]
    while edges[-1] * 2 < math.pi / 2:
        edges.append(edges[-1] * 2)
    edges.append(math.pi / 2)
    return np.array(edges)


def _gauss_panel(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def sigma_quadrature(kernel: CollisionKernel, extrapolate: bool) -> SigmaQuadrature:
    """Gauss-Legendre on geometric theta panels, uniform psi.

    With ``extrapolate`` the panel [theta_min/2, theta_min] is appended with its
    weight scaled by 2^p/(2^p - 1), p = 2 - nu, which is one Richardson step
    between the theta_min and theta_min/2 truncations.
    """
    thetas, weights, panels = [], [], []
    edges = panel_edges(kernel.theta_min)
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        x, w = _gauss_panel(lo, hi, kernel.n_theta)
        thetas.append(x)
        weights.append(w)
        panels.append(np.full(x.size, k))

    if extrapolate:
        p = kernel.extrapolation_order
        x, w = _gauss_panel(kernel.theta_min / 2, kernel.theta_min, kernel.n_theta)
        thetas.append(x)
        weights.append(w * 2.0**p / (2.0**p - 1.0))
        panels.append(np.full(x.size, -1))

    theta = np.concatenate(thetas)
    w_theta = np.concatenate(weights) * eval_b(theta, kernel) * np.sin(theta)
    # offset by half a step: symmetric under psi -> -psi and psi -> psi + pi
    psis = 2.0 * np.pi * (np.arange(kernel.n_psi) + 0.5) / kernel.n_psi
    w_psi = np.full(kernel.n_psi, 2.0 * np.pi / kernel.n_psi)
    return SigmaQuadrature(
        thetas=theta,
        psis=psis,
        weights=w_theta[:, None] * w_psi[None, :],
        panel=np.concatenate(panels),
        extrapolated=extrapolate,
    )
