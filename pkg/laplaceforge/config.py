from pathlib import Path
import math
import os

# ------------------------------
# Detect BASE_DIR / WORK_DIR
# ------------------------------

BASE_DIR = Path(__file__).resolve().parents[1]

if os.getenv("LAPLACEFORGE_WORK_DIR"):
    WORK_DIR = Path(os.environ["LAPLACEFORGE_WORK_DIR"])
else:
    # Local development environment
    WORK_DIR = BASE_DIR / "work"

# ------------------------------
# Work directories
# ------------------------------

SURFACES_DIR = WORK_DIR / "surfaces"
ESTIMATES_DIR = WORK_DIR / "estimates"
EXPERIMENTS_DIR = WORK_DIR / "experiments"
PLOTS_DIR = WORK_DIR / "plots"
REPORTS_DIR = WORK_DIR / "reports"

# ------------------------------
# Numeric defaults
# ------------------------------

DOMAIN_END = 2.0 * math.pi
NEAR_ZERO = 1e-12
MACHINE_EPS = 2.2e-16
POLE_GUARD = 1e-8

MAX_POLY_DEGREE = 4
FIT_WINDOW = 7

DEFAULT_GRID_POINTS = 257
WEIGHT_DELTA = 1e-9
COMPOSITE_NOISE_DEFAULT = 0.1

IRWIN_HALL_MAX_N = 12
I0_OVERFLOW_GUARD = 700.0
STEPWISE_MAX_TERMS = 100_000

THREADS_ENV = "LAPLACEFORGE_THREADS"


def default_rcond(rows: int, cols: int) -> float:
    return max(rows, cols) * MACHINE_EPS


def resolve_threads(flag: int | None = None) -> int:
    """
    Thread count for parallel attempts/trials.

    Explicit flag wins, then LAPLACEFORGE_THREADS, then 1.
    0 means one worker per CPU.
    """
    value = flag
    if value is None:
        env = os.getenv(THREADS_ENV)
        value = int(env) if env else 1
    if value < 0:
        raise ValueError(f"thread count must be >= 0, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value


# ------------------------------
# Ensure needed folders exist
# ------------------------------

def ensure_work_dirs() -> None:
    for d in [
        WORK_DIR,
        SURFACES_DIR,
        ESTIMATES_DIR,
        EXPERIMENTS_DIR,
        PLOTS_DIR,
        REPORTS_DIR,
    ]:
        d.mkdir(parents=True, exist_ok=True)
