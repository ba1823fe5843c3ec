import os
from fractions import Fraction
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# ============================================================================
# PATH CONFIGURATION - input networks and generated reports
# ============================================================================
PROJECT_ROOT = Path(__file__).parent.parent
DATA_DIR = PROJECT_ROOT / "data"
NETWORKS_DIR = DATA_DIR / "networks"
REPORTS_DIR = PROJECT_ROOT / "reports"
BENCHMARK_DIR = REPORTS_DIR / "benchmarks"
SWEEP_DIR = REPORTS_DIR / "sweeps"

for dir_path in [NETWORKS_DIR, REPORTS_DIR, BENCHMARK_DIR, SWEEP_DIR]:
    dir_path.mkdir(parents=True, exist_ok=True)

BENCHMARK_CSV_PATH = BENCHMARK_DIR / "experiments.csv"

# File patterns picked up by the network auto-detection
NETWORK_PATTERNS = ["*.bif", "*.json"]





# ============================================================================
# ANALYSIS CONFIGURATION - cost model, branch order, table limits
# ============================================================================
# Cost model used by ert and the simulator (see src/pgcl.py COST_MODELS)
DEFAULT_COST_MODEL = os.getenv("BNL_COST_MODEL", "standard")

# Branch order of translated blocks: 'lex' or 'rows'
DEFAULT_BRANCH_ORDER = os.getenv("BNL_BRANCH_ORDER", "lex")

# Largest expectation table built before aborting with TableTooLarge
MAX_TABLE_CELLS = int(os.getenv("BNL_MAX_TABLE_CELLS", "2000000"))

# Rows summing within this distance of 1 are rescaled under --normalize
NORMALIZE_TOLERANCE = Fraction(os.getenv("BNL_NORMALIZE_TOLERANCE", "1/1000000"))

# Significant digits of decimal annotations
DECIMAL_DIGITS = 6

# Joint-assignment cap for brute-force oracles
MAX_ORACLE_ASSIGNMENTS = 10**6





# ============================================================================
# SIMULATION CONFIGURATION - seeded rejection sampling
# ============================================================================
DEFAULT_SEED = int(os.getenv("BNL_SEED", "42"))
DEFAULT_TRIALS = int(os.getenv("BNL_TRIALS", "1000000"))
DEFAULT_MAX_STEPS = int(os.getenv("BNL_MAX_STEPS", "10000000"))

# Worker processes for simulator shards (1 runs inline)
SIM_JOBS = int(os.getenv("BNL_JOBS", "1"))

# Trials per shard; the shard plan fixes the result for a given seed
SIM_SHARD_SIZE = 250_000

# Draws fetched from the bit generator per refill
SIM_DRAW_BUFFER = 4096

# z-value of the two-sided 99% normal interval
Z_99 = Fraction(2576, 1000)

# Agreement bound in standard errors
AGREEMENT_SIGMAS = 4





# ============================================================================
# REFERENCE VALUES - experiments table, desk-scale rows
# ============================================================================
# nodes, edges, average Markov blanket (2 decimals), 0-observation EST
REFERENCE_EXPERIMENTS = {
    "earthquake": {"nodes": 5, "edges": 4, "avg_mb": "2.00", "est": 8},
    "cancer": {"nodes": 5, "edges": 4, "avg_mb": "2.00", "est": 8},
    "survey": {"nodes": 6, "edges": 6, "avg_mb": "2.67", "est": 10},
    "asia": {"nodes": 8, "edges": 8, "avg_mb": "2.50", "est": 14},
    "sachs": {"nodes": 11, "edges": 17, "avg_mb": "3.09", "est": 20},
}

# Trials per network in the benchmark pipeline
BENCHMARK_TRIALS = 200_000
