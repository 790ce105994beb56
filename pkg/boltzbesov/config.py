"""Configuration loading and management.

Two layers, as in any run of the tool:

* ``RuntimeConfig`` - process-level knobs (threads, seed, budgets, output
  directory) read from ``.env`` and ``BOLTZBESOV_*`` environment variables.
* ``SimulationConfig`` - the numerical setup (lattice, velocity grid, kernel,
  time stepping, regularizer, initial datum, verification family) read from a
  JSON file and validated with pydantic.
"""

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from boltzbesov.collision.kernel import CollisionKernel
from boltzbesov.constants import (
    DEFAULT_BOUND_RATIO_LIMIT,
    DEFAULT_DELTA2,
    DEFAULT_DELTA3,
    DEFAULT_DT,
    DEFAULT_FAMILY_COUNT,
    DEFAULT_HALF_LENGTH,
    DEFAULT_INNER_MAX_ITER,
    DEFAULT_INNER_TOL,
    DEFAULT_LATTICE_POINTS,
    DEFAULT_OP_BUDGET,
    DEFAULT_OUT_DIR,
    DEFAULT_PICARD_MAX_ITER,
    DEFAULT_PICARD_TOL,
    DEFAULT_SEED,
    DEFAULT_SNAPSHOT_EVERY,
    DEFAULT_STABILITY_FACTOR,
    DEFAULT_T_FINAL,
    DEFAULT_THREADS,
    DEFAULT_VELOCITY_HALF_WIDTH,
    DEFAULT_VELOCITY_POINTS,
    ENV_OP_BUDGET,
    ENV_OUT_DIR,
    ENV_SEED,
    ENV_STABILITY_FACTOR,
    ENV_THREADS,
)
from boltzbesov.errors import ConfigurationError


@dataclass
class RuntimeConfig:
    """Process-level configuration.

    Loads from .env and BOLTZBESOV_* environment variables.
    """

    threads: int = DEFAULT_THREADS
    seed: int = DEFAULT_SEED
    op_budget: float = DEFAULT_OP_BUDGET
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    stability_factor: float = DEFAULT_STABILITY_FACTOR

    @classmethod
    def load(cls, env_file: Optional[Path] = None) -> "RuntimeConfig":
        """Load runtime configuration from the environment.

        Args:
            env_file: Optional explicit .env path (default: search upwards from cwd)

        Returns:
            RuntimeConfig instance
        """
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv()

        try:
            return cls(
                threads=int(os.getenv(ENV_THREADS, DEFAULT_THREADS)),
                seed=int(os.getenv(ENV_SEED, DEFAULT_SEED)),
                op_budget=float(os.getenv(ENV_OP_BUDGET, DEFAULT_OP_BUDGET)),
                out_dir=Path(os.getenv(ENV_OUT_DIR, DEFAULT_OUT_DIR)),
                stability_factor=float(
                    os.getenv(ENV_STABILITY_FACTOR, DEFAULT_STABILITY_FACTOR)
                ),
            )
        except ValueError as e:
            raise ConfigurationError(f"Invalid environment override: {e}") from e

    def validate(self) -> list[str]:
        """Validate configuration and return list of errors.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []

        if self.threads < 1:
            errors.append("threads must be at least 1")

        if not 0 <= self.seed < 2**64:
            errors.append("seed must be an unsigned 64-bit integer")

        if self.op_budget <= 0:
            errors.append("op_budget must be positive")

        if self.stability_factor < 1:
            errors.append("stability_factor must be at least 1")

        return errors

    def to_dict(self) -> dict:
        """Convert config to dictionary (for logging/report headers)."""
        return {
            "threads": self.threads,
            "seed": self.seed,
            "op_budget": self.op_budget,
            "out_dir": str(self.out_dir),
            "stability_factor": self.stability_factor,
        }


class LatticeSpec(BaseModel):
    """Periodic x-lattice on the torus [0, 2L)^3."""

    model_config = ConfigDict(extra="forbid")

    half_length: float = Field(DEFAULT_HALF_LENGTH, gt=0, description="Box half-length L")
    points: int = Field(DEFAULT_LATTICE_POINTS, description="Points per axis N_x (power of two)")
    q_max: Optional[int] = Field(None, description="Top dyadic block (default: largest valid)")


class VelocityGridSpec(BaseModel):
    """Truncated velocity box [-V, V]^3 with cell-midpoint abscissae."""

    model_config = ConfigDict(extra="forbid")

    half_width: float = Field(DEFAULT_VELOCITY_HALF_WIDTH, description="Half-width V")
    points: int = Field(DEFAULT_VELOCITY_POINTS, description="Points per axis N_v (even)")


class RegularizerSpec(BaseModel):
    """Mollifier / weight parameters applied to the collision source term."""

    model_config = ConfigDict(extra="forbid")

    enabled: bool = Field(False, description="Apply the regularizer in the collision substep")
    delta: float = Field(0.0, ge=0, description="Mollifier scale for M^delta and S_delta")
    delta_prime: float = Field(0.0, ge=0, description="Weight scale for W_delta'")
    weight_order: float = Field(1.0, ge=1, description="Weight exponent N")
    mollifier_order: float = Field(1.0, description="Mollifier exponent N0 (nu/2 <= N0 <= 1)")


class InitialDatumSpec(BaseModel):
    """Initial perturbation g0."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["zero", "gaussian", "microscopic"] = Field(
        "gaussian", description="zero, gaussian envelope, or its microscopic part"
    )
    amplitude: float = Field(1e-3, ge=0, description="Target L2_v(B^{3/2}_x) size of g0")
    k_decay: float = Field(1.0, gt=0, description="Gaussian envelope width in x-frequency")
    v_decay: float = Field(1.0, gt=0, description="Gaussian envelope width in v-frequency")
    nonnegative: bool = Field(True, description="Clip so that f0 = mu + sqrt(mu) g0 >= 0")


class FamilySpec(BaseModel):
    """Randomized field family for the verification harness."""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(DEFAULT_FAMILY_COUNT, ge=1, description="Samples per family")
    k_decay: float = Field(1.0, gt=0, description="Envelope width in x-frequency")
    v_decay: float = Field(1.0, gt=0, description="Envelope width in v-frequency")
    amplitude: float = Field(1.0, ge=0, description="Target L2 norm of each sample")
    snapshots: int = Field(3, ge=1, le=8, description="Snapshots per synthetic trajectory")
    horizon: float = Field(0.1, gt=0, description="Time horizon T of synthetic trajectories")
    refinements: list[int] = Field(
        default_factory=lambda: [8, 12], description="Velocity N_v values for refinement tables"
    )
    lattice_refinements: list[int] = Field(
        default_factory=lambda: [16, 32], description="Lattice N_x values for refinement tables"
    )


class SimulationConfig(BaseModel):
    """Complete numerical setup, read from a JSON file."""

    model_config = ConfigDict(extra="forbid")

    lattice: LatticeSpec = Field(default_factory=LatticeSpec)
    velocity: VelocityGridSpec = Field(default_factory=VelocityGridSpec)
    kernel: CollisionKernel = Field(default_factory=CollisionKernel)
    dt: float = Field(DEFAULT_DT, gt=0, description="Time step")
    t_final: float = Field(DEFAULT_T_FINAL, gt=0, description="Final time T")
    snapshot_every: int = Field(DEFAULT_SNAPSHOT_EVERY, ge=1, description="Snapshot cadence")
    scheme: Literal["rk2", "semi-implicit"] = Field("rk2", description="Collision substep")
    include_collision: bool = Field(True, description="Disable for transport-only runs")
    include_nonlinear: bool = Field(True, description="Include Gamma(g, g)")
    inner_tol: float = Field(DEFAULT_INNER_TOL, gt=0)
    inner_max_iter: int = Field(DEFAULT_INNER_MAX_ITER, ge=1)
    picard_tol: float = Field(DEFAULT_PICARD_TOL, gt=0)
    picard_max_iter: int = Field(DEFAULT_PICARD_MAX_ITER, ge=1)
    small_data_threshold: Optional[float] = Field(
        None, description="epsilon_1 for Picard; None skips the check"
    )
    bound_ratio_limit: float = Field(DEFAULT_BOUND_RATIO_LIMIT, gt=0)
    delta2: float = Field(DEFAULT_DELTA2, gt=0, lt=1)
    delta3: float = Field(DEFAULT_DELTA3, gt=0, lt=1)
    regularizer: RegularizerSpec = Field(default_factory=RegularizerSpec)
    initial: InitialDatumSpec = Field(default_factory=InitialDatumSpec)
    family: FamilySpec = Field(default_factory=FamilySpec)

    @model_validator(mode="after")
    def _check_consistency(self) -> "SimulationConfig":
        if self.delta3 >= self.delta2:
            raise ValueError("delta3 must be smaller than delta2")
        reg = self.regularizer
        if reg.enabled and not self.kernel.nu / 2 <= reg.mollifier_order <= 1:
            raise ValueError("mollifier_order N0 must satisfy nu/2 <= N0 <= 1")
        if self.dt > self.t_final:
            raise ValueError("dt must not exceed t_final")
        return self

    @property
    def steps(self) -> int:
        """Number of time steps to reach t_final."""
        return max(1, int(round(self.t_final / self.dt)))

    @classmethod
    def from_file(cls, path: Path) -> "SimulationConfig":
        """Load and validate a JSON configuration file.

        Args:
            path: Path to the JSON file

        Returns:
            Validated SimulationConfig

        Raises:
            ConfigurationError: Missing file, bad JSON, or schema violation
        """
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}")
        try:
            with open(path) as f:
                data = json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            raise ConfigurationError(f"Cannot read config {path}: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        """Validate a configuration mapping."""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid configuration: {e}") from e

    def to_dict(self) -> dict:
        """Convert config to dictionary (for logging/report headers)."""
        return self.model_dump(mode="json")
