"""Seeded random field families and the shared harness context."""

import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.fft

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.kernel import CollisionKernel
from boltzbesov.collision.norms import TripleNormForm, triple_norm_form
from boltzbesov.collision.operators import CollisionOperator, operator_for
from boltzbesov.config import FamilySpec, RuntimeConfig, SimulationConfig
from boltzbesov.constants import DEFAULT_OP_BUDGET, DEFAULT_STABILITY_FACTOR
from boltzbesov.kinetics.maxwellian import maxwellian_power
from boltzbesov.solver.initial import random_kinetic_field
from boltzbesov.solver.transport import transport
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField
from boltzbesov.spaces.partition import DyadicPartition, build_partition
from boltzbesov.state import Trajectory
from boltzbesov.verify.report import ConstantReport

logger = logging.getLogger(__name__)

V_AXES = (0, 1, 2)


@dataclass(frozen=True)
class FieldFamily:
    """Reproducible family of smooth random fields.

    Sample ``i`` of role ``r`` draws from ``default_rng([seed, i, r])``, so
    every sample is independent of ``count`` and of the order of evaluation.
    ``amplitude = 0`` gives the zero family.
    """

    seed: int
    count: int
    lattice: FrequencyLattice
    grid: VelocityGrid
    k_decay: float = 1.0
    v_decay: float = 1.0
    amplitude: float = 1.0
    snapshots: int = 3
    horizon: float = 0.1

    @classmethod
    def from_spec(
        cls, spec: FamilySpec, lattice: FrequencyLattice, grid: VelocityGrid, seed: int
    ) -> "FieldFamily":
        return cls(
            seed=seed,
            count=spec.count,
            lattice=lattice,
            grid=grid,
            k_decay=spec.k_decay,
            v_decay=spec.v_decay,
            amplitude=spec.amplitude,
            snapshots=spec.snapshots,
            horizon=spec.horizon,
        )

    def with_grids(
        self, lattice: Optional[FrequencyLattice] = None, grid: Optional[VelocityGrid] = None
    ) -> "FieldFamily":
        """Same family at another resolution."""
        return replace(self, lattice=lattice or self.lattice, grid=grid or self.grid)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0

    @cached_property
    def partition(self) -> DyadicPartition:
        return build_partition(self.lattice)

    def rng(self, index: int, role: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, index, role])

    def velocity_sample(self, index: int, role: int = 0) -> np.ndarray:
        """Real velocity function R mu^(1/4) with unit-scaled L^2_v norm times amplitude."""
        if self.is_zero:
            return np.zeros(self.grid.size)
        grid = self.grid
        noise = self.rng(index, role).standard_normal(grid.shape)
        xi_sq = np.sum(grid.frequencies**2, axis=1).reshape(grid.shape)
        smooth = scipy.fft.ifftn(
            scipy.fft.fftn(noise, axes=V_AXES) * np.exp(-0.5 * xi_sq / self.v_decay**2),
            axes=V_AXES,
        ).real
        f = smooth.ravel() * maxwellian_power(grid, 0.25)
        return f * (self.amplitude / float(grid.norm(f)))

    def velocity_triple(self, index: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.velocity_sample(index, 0),
            self.velocity_sample(index, 1),
            self.velocity_sample(index, 2),
        )

    def kinetic_sample(self, index: int, role: int = 0) -> SpectralField:
        """Kinetic field R(x, v) mu^(1/2) with L^2_{x,v} norm equal to the amplitude."""
        if self.is_zero:
            return SpectralField.zeros(self.lattice, self.grid)
        r = random_kinetic_field(
            self.lattice, self.grid, self.rng(index, role), self.k_decay, self.v_decay
        )
        g = r.weighted(maxwellian_power(self.grid, 0.5))
        return g * (self.amplitude / g.l2_norm())

    def scalar_sample(self, index: int, role: int = 0) -> SpectralField:
        """Real scalar field on the lattice with unit L^2_x norm times amplitude."""
        if self.is_zero:
            return SpectralField.zeros(self.lattice)
        noise = self.rng(index, role).standard_normal(self.lattice.shape)
        f = SpectralField.from_physical(noise, self.lattice)
        f = f.with_coeffs(f.coeffs * np.exp(-0.5 * (self.lattice.magnitude / self.k_decay) ** 2))
        return f * (self.amplitude / f.l2_norm())

    @property
    def times(self) -> list[float]:
        if self.snapshots == 1:
            return [0.0]
        return list(np.linspace(0.0, self.horizon, self.snapshots))

    def trajectory(self, index: int, role: int = 0) -> Trajectory:
        """Synthetic trajectory: a random field carried by free transport and damped in time."""
        g = self.kinetic_sample(index, role)
        return Trajectory(
            self.times, [transport(g, t) * float(np.exp(-t)) for t in self.times]
        )

    def describe(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "k_decay": self.k_decay,
            "v_decay": self.v_decay,
            "amplitude": self.amplitude,
            "snapshots": self.snapshots,
            "horizon": self.horizon,
            "lattice_points": self.lattice.points,
            "velocity_points": self.grid.points,
        }


@dataclass
class VerifyContext:
    """Kernel, work limits and report header shared by every check."""

    kernel: CollisionKernel
    threads: int = 1
    op_budget: float = DEFAULT_OP_BUDGET
    stability_factor: float = DEFAULT_STABILITY_FACTOR
    delta2: float = 1e-1
    delta3: float = 1e-2

    @classmethod
    def from_config(cls, config: SimulationConfig, runtime: RuntimeConfig) -> "VerifyContext":
        return cls(
            kernel=config.kernel,
            threads=runtime.threads,
            op_budget=runtime.op_budget,
            stability_factor=runtime.stability_factor,
            delta2=config.delta2,
            delta3=config.delta3,
        )

    def operator(self, grid: VelocityGrid) -> CollisionOperator:
        op = operator_for(grid, self.kernel, self.threads, self.op_budget)
        op.check_budget()
        return op

    def form(self, grid: VelocityGrid) -> TripleNormForm:
        return triple_norm_form(grid, self.kernel)

    def header(self, family: FieldFamily) -> dict:
        return {"kernel": self.kernel.describe(), "family": family.describe()}

    def report(
        self, id: str, description: str, family: FieldFamily, **kwargs: object
    ) -> ConstantReport:
        """Empty report stamped with this context's header and stability factor."""
        return ConstantReport(
            id=id,
            description=description,
            header=self.header(family),
            stability_factor=self.stability_factor,
            **kwargs,  # type: ignore[arg-type]
        )
