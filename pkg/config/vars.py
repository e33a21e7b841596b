# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Local configuration, created from vars.py.example

# Standard library imports
import os

# Third-party imports
from dotenv import load_dotenv

load_dotenv()

# Logging
DEBUG_ENABLED = False
LOG_RETENTION_DAYS = 7

# Concurrency
DEFAULT_THREADS = 4

# Output
OUTPUT_DIR = "results"
WAVEKIN_CACHE = os.getenv("WAVEKIN_CACHE", "")

# Budgets
TERM_CAP = 1_000_000
TRIPLE_CAP = 400_000_000
QUINTUPLE_CAP = 5_000_000
CHUNK_PAIRS = 2_000_000

# Quadrature
QUAD_RTOL = 1e-6
QUAD_ATOL = 1e-8
TIME_QUAD_RTOL = 1e-10
QUAD_START_ORDER = 48
QUAD_MAX_ORDER = 384
PV_MAX_SPACING = 0.05

# Regime
AR_STRICTNESS = 0.1
PRUNE_LOG_TOL = -69.0

# NLS oracle
ORACLE_N = 512
ORACLE_BOX_FACTOR = 16.0
ORACLE_PHASE_GUARD = 0.1
ORACLE_LEAK_TOL = 1e-12
ORACLE_MIN_BINS = 4
