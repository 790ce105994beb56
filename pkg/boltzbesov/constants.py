"""Constants and default values for BoltzBesov."""

import math

# Frequency lattice defaults
DEFAULT_HALF_LENGTH = 2.0 * math.pi
DEFAULT_LATTICE_POINTS = 16
MIN_LATTICE_POINTS = 8

# Dyadic profile geometry: chi lives on the ball of radius 4/3, phi on [3/4, 8/3]
CHI_INNER_RADIUS = 3.0 / 4.0
CHI_OUTER_RADIUS = 4.0 / 3.0
ANNULUS_OUTER_RADIUS = 8.0 / 3.0
UNITY_TOLERANCE = 1e-12

# Velocity grid defaults
DEFAULT_VELOCITY_HALF_WIDTH = 8.0
MIN_VELOCITY_HALF_WIDTH = 6.0
DEFAULT_VELOCITY_POINTS = 8
INTERPOLATION_SCHEMES = ("trilinear", "nearest")

# Kernel parameter sets (gamma, nu); soft has gamma + nu <= 0, hard has gamma + nu > 0
SOFT_KERNEL = {"gamma": -0.5, "nu": 0.5}
HARD_KERNEL = {"gamma": 0.25, "nu": 0.5}
KERNEL_PRESETS = {"soft": SOFT_KERNEL, "hard": HARD_KERNEL}
DEFAULT_KERNEL_AMPLITUDE = 1.0
DEFAULT_THETA_MIN = 0.05
DEFAULT_N_THETA = 4  # Gauss-Legendre nodes per geometric panel
DEFAULT_N_PSI = 8

# Work limits
DEFAULT_OP_BUDGET = 5e10  # pair-node evaluations per collision sweep
DEFAULT_CHUNK_ELEMENTS = 2**18  # collision configurations per chunk
CACHE_CONFIG_LIMIT = 2**20  # chunks are kept in memory below this many configurations
DEFAULT_THREADS = 1

# Quadrature-floor handling
FLOOR_FACTOR = 10.0
GRAM_CONDITION_LIMIT = 1e12
FLOOR_MINIMUM = 1e-13  # round-off level of an exactly vanishing identity
WORK_ELEMENTS = 2**24  # configuration x field entries held per batched pass

# Energy functional weights
DEFAULT_DELTA2 = 1e-1
DEFAULT_DELTA3 = 1e-2
DELTA_SWEEP = [(1e-1, 1e-2), (5e-2, 5e-3), (2e-2, 1e-3), (1e-2, 1e-4), (5e-3, 1e-5)]

# Solver defaults
DEFAULT_DT = 0.01
DEFAULT_T_FINAL = 0.1
DEFAULT_SNAPSHOT_EVERY = 1
DEFAULT_PICARD_TOL = 1e-10
DEFAULT_PICARD_MAX_ITER = 12
CONTRACTION_PATIENCE = 3
DEFAULT_INNER_TOL = 1e-12
DEFAULT_INNER_MAX_ITER = 50
DEFAULT_BOUND_RATIO_LIMIT = 1e3
BESOV_ENERGY_REGULARITY = 1.5
BESOV_MACRO_REGULARITY = 0.5

# Verification harness
DEFAULT_STABILITY_FACTOR = 2.0
DEFAULT_FAMILY_COUNT = 20
DEFAULT_SEED = 20240601
SCALING_TOLERANCE = 1e-10
LATTICE_CHECK_VELOCITY_POINTS = 4  # lattice-side checks do not resolve v
WEAK_STRONG_VELOCITY_POINTS = 6
SUITES = ("core", "collision", "solver", "full")

# CLI exit codes
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SUITE_FAILURE = 2
EXIT_NUMERICAL_ABORT = 3
SUBCOMMANDS = ("simulate", "picard", "verify", "norms", "moments")

# Environment variables
ENV_THREADS = "BOLTZBESOV_THREADS"
ENV_SEED = "BOLTZBESOV_SEED"
ENV_OP_BUDGET = "BOLTZBESOV_OP_BUDGET"
ENV_OUT_DIR = "BOLTZBESOV_OUT_DIR"
ENV_STABILITY_FACTOR = "BOLTZBESOV_STABILITY_FACTOR"
DEFAULT_OUT_DIR = "runs"

# Maxwellian moments: (name, exact value)
MOMENT_REFERENCES = [
    ("1", 1.0),
    ("|v_i|^2", 1.0),
    ("|v|^2", 3.0),
    ("|v_i|^2|v_j|^2", 1.0),
    ("|v_i|^4", 3.0),
    ("|v|^2|v_i|^2", 5.0),
    ("|v|^4", 15.0),
    ("|v|^4|v_i|^2", 35.0),
]
