"""
Constants for opencarnot

This module centralizes all tolerances, solver defaults and configuration
values so the numerical modules never hard-code them.
"""

import math

# ==================== Linear Algebra Tolerances ====================

# Antisymmetry check for user supplied structure matrices (relative)
SKEW_TOLERANCE = 1e-12

# Numerical rank tolerance for the Hörmander span condition (relative)
HORMANDER_RANK_TOLERANCE = 1e-10

# Rotation frequencies below this fraction of ||M|| belong to the kernel
KERNEL_TOLERANCE = 1e-12

# Frequencies agreeing within this relative gap are merged into one cluster
FREQUENCY_MERGE_TOLERANCE = 1e-9

# Nullspace threshold for homogeneous systems solved by SVD (relative)
NULLSPACE_TOLERANCE = 1e-10

# Default endpoint rank tolerance (relative to the largest singular value)
DEFAULT_RANK_TOLERANCE = 1e-8

# Default relative cut-off for the support of a bivector
DEFAULT_SUPPORT_TOLERANCE = 1e-10

# Membership of a point in a subgroup G_W
SUBGROUP_MEMBERSHIP_TOLERANCE = 1e-10

# Precondition check <Aw, y> orthogonal to sigma
ORTHOGONALITY_TOLERANCE = 1e-10

# Unit vector check
UNIT_NORM_TOLERANCE = 1e-8

# Switch to Taylor series in closed-form trigonometric integrals
SERIES_THRESHOLD = 1e-3

# ==================== Group Presets ====================

PRESET_HEISENBERG = "heisenberg"
PRESET_FREE = "free"
PRESET_H_TIMES_R = "h_times_r"
PRESET_H_ALPHA = "h_alpha"
PRESET_ENGEL = "engel"
PRESET_MARTINET = "martinet"

ALL_PRESETS = [
    PRESET_HEISENBERG,
    PRESET_FREE,
    PRESET_H_TIMES_R,
    PRESET_H_ALPHA,
    PRESET_ENGEL,
    PRESET_MARTINET,
]

MODEL_ENGEL = PRESET_ENGEL
MODEL_MARTINET = PRESET_MARTINET

# Free groups F_m supported by the preset library
FREE_MIN_RANK = 2
FREE_MAX_RANK = 8

# Largest horizontal dimension accepted from a config file
MAX_HORIZONTAL_DIM = 16

# ==================== Métivier Check ====================

METIVIER_YES = "yes"
METIVIER_NO = "no"
METIVIER_INCONCLUSIVE = "inconclusive"

# Minimum number of sphere samples in the coarse search
METIVIER_GRID_POINTS = 10000

# Local descents started from the best grid points
METIVIER_REFINE_STARTS = 10

# Refined minimum below this means singular, above the upper one nonsingular
METIVIER_SINGULAR_THRESHOLD = 1e-8
METIVIER_REGULAR_THRESHOLD = 1e-4

# Seed for the spherical sample when no structured grid exists
METIVIER_GRID_SEED = 0

# ==================== Control Discretization ====================

DEFAULT_N_STEPS = 64

# Resolution used when sampling extremals for cross-checks
EXTREMAL_SAMPLE_STEPS = 256

# ==================== Distance Solver Defaults ====================

DEFAULT_N_STARTS = 32
DEFAULT_SEED = 42
DEFAULT_FEAS_TOL = 1e-6
DEFAULT_GRAD_TOL = 1e-8
DEFAULT_MAX_OUTER = 20
DEFAULT_PENALTY_GROWTH = 10.0
DEFAULT_INITIAL_PENALTY = 10.0
DEFAULT_MAX_INNER_ITER = 2000
DEFAULT_N_WORKERS = 1

# Penalty parameter is never grown past this value
MAX_PENALTY = 1e8

# Penalty grows when the residual did not drop by this factor
PENALTY_DECREASE_FACTOR = 0.25

# L-BFGS-B relative function tolerance for the inner solves
INNER_FTOL = 1e-15

# Multistart seeding: odd starts carry one Fourier mode (frequencies
# 1..START_MAX_MODE) with a loop radius of sqrt|vertical part|, floored at
# START_MIN_RADIUS * |target|; the Fourier starts get noise of
# START_NOISE_FRACTION * |target| and the even starts full-scale noise
START_MAX_MODE = 3
START_MIN_RADIUS = 0.1
START_NOISE_FRACTION = 0.1

# Gauss-Newton iteration cap when pulling a start onto the constraint
RESTORATION_MAX_NFEV = 200

# Shooting solver: initial covector scale and iteration cap
SHOOTING_TAU_SCALE = 2.0 * math.pi
SHOOTING_MAX_NFEV = 400

# Brute-force oracle
ORACLE_MAX_STEPS = 8
ORACLE_DEFAULT_BUDGET = 100000
ORACLE_PENALTY = 1e4
ORACLE_SAMPLE_FRACTION = 0.3
ORACLE_MIN_STEP = 1e-7

# Solver method tags
METHOD_DIRECT = "direct"
METHOD_SHOOTING = "shooting"
METHOD_DIRECT_SHOOTING = "direct+shooting"
METHOD_IDENTITY = "identity"

# ==================== Probe Defaults ====================

# Estimated relative accuracy of a converged distance value
VALUE_ACCURACY = 1e-3

# Probes refuse parameters below this multiple of VALUE_ACCURACY
PARAMETER_FLOOR_FACTOR = 10.0

DEFAULT_CUSP_BETAS = (0.01, 0.05, 0.1)
DEFAULT_ENGEL_VERTICAL_LAMBDAS = (0.05, 0.1, 0.2)
DEFAULT_HORIZONTAL_LAMBDAS = (0.4, 0.2, 0.1)
DEFAULT_SECOND_DIFFERENCE_SCALES = (0.1, 0.05, 0.025)
DEFAULT_HORIZONTAL_DELTA = 0.5

# Max/min quotient ratio tolerated by the horizontal uniformity check
UNIFORMITY_RATIO = 1.5

# Verdicts
VERDICT_CONSISTENT = "consistent"
VERDICT_VIOLATION = "violation"
VERDICT_INCONCLUSIVE = "inconclusive"

# Probe kinds
PROBE_SECOND_DIFFERENCE = "second-difference"
PROBE_CUSP = "cusp"
PROBE_FREE_CUSP = "free-cusp"
PROBE_ENGEL_VERTICAL = "engel-vertical"
PROBE_ENGEL_HORIZONTAL = "engel-horizontal"
PROBE_HORIZONTAL = "horizontal"
PROBE_MARTINET_VERTICAL = "martinet-vertical"
PROBE_MARTINET_HORIZONTAL = "martinet-horizontal"

ALL_PROBE_KINDS = [
    PROBE_SECOND_DIFFERENCE,
    PROBE_CUSP,
    PROBE_FREE_CUSP,
    PROBE_ENGEL_VERTICAL,
    PROBE_ENGEL_HORIZONTAL,
    PROBE_HORIZONTAL,
    PROBE_MARTINET_VERTICAL,
    PROBE_MARTINET_HORIZONTAL,
]

# ==================== Exit Codes ====================

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_INCONCLUSIVE = 3
EXIT_NOT_CONVERGED = 4

# ==================== File I/O Constants ====================

# JSON formatting
JSON_INDENT = 2

# CSV headers
PROBE_CSV_COLUMNS = [
    "parameter", "distance", "base_distance", "quotient", "lower_bound", "converged",
]
SCAN_CSV_COLUMNS = ["u", "v", "distance", "converged"]
CONTROL_CSV_STEP_COLUMN = "step"

# Default output names
DEFAULT_CONTROL_CSV = "control.csv"

# ==================== Logging Constants ====================

# Logging configuration
LOG_LEVEL_DEBUG = "DEBUG"
LOG_LEVEL_INFO = "INFO"
LOG_LEVEL_WARNING = "WARNING"

# Default logging level (can be overridden by environment variable OPENCARNOT_LOG_LEVEL)
DEFAULT_LOG_LEVEL = LOG_LEVEL_WARNING

# Log format strings
LOG_FORMAT_SIMPLE = "%(levelname)s: %(message)s"
LOG_FORMAT_DETAILED = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Date format for logging
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Environment variable name for log level override
LOG_LEVEL_ENV_VAR = "OPENCARNOT_LOG_LEVEL"
