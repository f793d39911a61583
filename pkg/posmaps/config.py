"""
Configuration for posmaps
Numerical tolerances, certifier defaults and logging level, overridable from the environment
"""
import os

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


# Default tolerance used by the CLI and the classification helpers
DEFAULT_TOL = _env_float("POSMAPS_TOL", 1e-9)

# Certifier defaults
DEFAULT_SEED = _env_int("POSMAPS_SEED", 0)
DEFAULT_RESTARTS = _env_int("POSMAPS_RESTARTS", 64)
DEFAULT_MAX_ITERS = _env_int("POSMAPS_MAX_ITERS", 200)
DEFAULT_CONVERGENCE_TOL = _env_float("POSMAPS_CONVERGENCE_TOL", 1e-12)
DEFAULT_VIOLATION_THRESHOLD = _env_float("POSMAPS_VIOLATION_THRESHOLD", 1e-8)
DEFAULT_WORKERS = _env_int("POSMAPS_WORKERS", 1)

LOG_LEVEL = os.getenv("POSMAPS_LOG_LEVEL", "WARNING")

# Tolerance table (all relative to max(1, ||H||_F) unless noted)
TOLERANCES = {
    'hermitian': 1e-8,        # ||H - H^dag||_F accepted before symmetrizing
    'unitary': 1e-8,          # ||U^dag U - I||_F
    'psd': 1e-9,              # lambda_min >= -tol * scale
    'rank': 1e-9,             # eigenvalues / singular values below tol * largest are dropped
    'purification': 1e-7,     # tr_2 |x><x| vs A_1, Frobenius
    'trace_one': 1e-8,        # |tr(rho) - 1| for density matrices
}

# First-factor dimensions (r, n) where PPT is equivalent to separability
PPT_DECIDES_SEPARABILITY_MAX_PRODUCT = 6
