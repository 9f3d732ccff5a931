import os
from dotenv import load_dotenv

# Always load .env file if it exists (local overrides for batch runs)
load_dotenv()

# =============================================================================
# OUTPUT CONFIGURATION
# =============================================================================
OUTPUT_DIR = os.getenv("RAMAN_OUTPUT_DIR", "raman_output")
REPORT_SCHEMA_VERSION = "1.0"
CSV_FLOAT_FORMAT = "%.17g"  # 17 significant digits round-trips a float64

# =============================================================================
# TRUNCATED FOCK-SPACE ORACLE
# =============================================================================
FOCK_N_MAX = int(os.getenv("RAMAN_FOCK_N_MAX", 10))  # dimension (N+1)^3 = 1331
FOCK_N_MAX_CEILING = 16  # dimension 4913
TAIL_TOLERANCE = float(os.getenv("RAMAN_TAIL_TOL", 1e-10))
STRICT_MODE = os.getenv("RAMAN_STRICT", "false").lower() == "true"

# =============================================================================
# MODEL VALIDITY
# =============================================================================
# gL/c must stay small for higher-order sidebands to be negligible; the 0.5
# level is a repo convention.
GT_WARNING_LEVEL = 0.5
COHERENCE_BOUND = 0.5
SMALL_GT_SERIES_THRESHOLD = 1e-8

# =============================================================================
# STATISTICS SETTINGS
# =============================================================================
N_TOP = 4
PHI_GRID_POINTS = 720
NORMALIZATION_FLOOR = 1e-6  # below this <n_q> normalized squeezing is undefined

# =============================================================================
# RUNNER SETTINGS
# =============================================================================
DEFAULT_JOBS = int(os.getenv("RAMAN_JOBS", 1))
VERIFY_TOLERANCE = 1e-8
LOG_LEVEL = os.getenv("RAMAN_LOG_LEVEL", "INFO")
