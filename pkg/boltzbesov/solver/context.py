"""Everything a run needs that is derived once from the configuration."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from boltzbesov.collision.grid import VelocityGrid
from boltzbesov.collision.norms import triple_norm_form
from boltzbesov.collision.operators import CollisionOperator, operator_for
from boltzbesov.config import RuntimeConfig, SimulationConfig
from boltzbesov.constants import FLOOR_FACTOR, FLOOR_MINIMUM
from boltzbesov.kinetics.energy import EnergyFunctionalParams
from boltzbesov.kinetics.maxwellian import maxwellian_at
from boltzbesov.solver.initial import initial_datum
from boltzbesov.solver.stepper import Source, StrangStepper
from boltzbesov.spaces.lattice import FrequencyLattice, SpectralField
from boltzbesov.spaces.partition import DyadicPartition, build_partition

logger = logging.getLogger(__name__)


@dataclass
class SolverContext:
    """Lattice, grid, partition and collision quadrature of one configuration."""

    config: SimulationConfig
    runtime: RuntimeConfig
    lattice: FrequencyLattice
    grid: VelocityGrid
    partition: DyadicPartition
    operator: Optional[CollisionOperator] = None
    _form: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def threads(self) -> int:
        return self.runtime.threads

    @property
    def form(self) -> np.ndarray:
        """Matrix of the squared triple norm on the velocity grid."""
        if self._form is None:
            self._form = triple_norm_form(self.grid, self.config.kernel).matrix
        return self._form

    @property
    def energy_params(self) -> EnergyFunctionalParams:
        return EnergyFunctionalParams(delta2=self.config.delta2, delta3=self.config.delta3)

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Generator for one independent random stream of this run's seed."""
        return np.random.default_rng([self.runtime.seed, stream])

    def stepper(
        self, source: Optional[Source] = None, config: Optional[SimulationConfig] = None
    ) -> StrangStepper:
        return StrangStepper(self.operator, config or self.config, source, workers=self.threads)

    def initial(self, stream: int = 0) -> SpectralField:
        return initial_datum(
            self.config.initial,
            self.lattice,
            self.grid,
            self.rng(stream),
            self.partition,
            self.threads,
        )

    def positivity_tolerance(self) -> float:
        """epsilon_pos for min f.

        The larger of the trilinear interpolation error of mu, h^2 mu(0) / 8,
        and FLOOR_FACTOR times the drift one step of the conservative
        quadrature gives mu itself, dt max |Q(mu, mu)|, floored at
        FLOOR_MINIMUM mu(0).
        """
        peak = float(maxwellian_at(np.zeros((1, 3)))[0])
        interpolation = self.grid.spacing**2 * peak / 8.0
        if self.operator is None:
            return interpolation
        drift = self.config.dt * self.operator.floor().drift
        return max(interpolation, FLOOR_FACTOR * max(drift, FLOOR_MINIMUM * peak))

    def header(self) -> dict:
        """Provenance stamped on every output file."""
        return {
            "seed": self.runtime.seed,
            "kernel": self.config.kernel.describe(),
            "lattice": {
                "half_length": self.lattice.half_length,
                "points": self.lattice.points,
                "q_max": self.partition.q_max,
            },
            "velocity_grid": {"half_width": self.grid.half_width, "points": self.grid.points},
        }


def build_context(
    config: SimulationConfig, runtime: Optional[RuntimeConfig] = None
) -> SolverContext:
    """Derive lattice, grid, partition and (when collisions are on) the operator.

    Raises:
        ConfigurationError: Lattice too coarse for the requested q_max
        BudgetExceededError: Collision sweep above the runtime budget
    """
    runtime = runtime or RuntimeConfig()
    lattice = FrequencyLattice(config.lattice.half_length, config.lattice.points)
    grid = VelocityGrid(config.velocity.half_width, config.velocity.points)
    partition = build_partition(lattice, config.lattice.q_max)
    operator = None
    if config.include_collision:
        operator = operator_for(grid, config.kernel, runtime.threads, runtime.op_budget)
        operator.check_budget()
    logger.debug(f"context N_x={lattice.points} N_v={grid.points} q_max={partition.q_max}")
    return SolverContext(config, runtime, lattice, grid, partition, operator)
