import os
from dotenv import load_dotenv

load_dotenv()


class Settings:
    ARITH_MODE: str = os.getenv("ARITH_MODE", "exact")

    # Float-mode tolerances (exact mode compares exactly)
    EPS_FEAS: float = float(os.getenv("EPS_FEAS", "1e-8"))
    EPS_PIV: float = float(os.getenv("EPS_PIV", "1e-9"))
    EPS_RANK: float = float(os.getenv("EPS_RANK", "1e-10"))

    # Simplex iteration limit is 10 * 2**min(n, ITERATION_EXPONENT_CAP)
    ITERATION_EXPONENT_CAP: int = int(os.getenv("ITERATION_EXPONENT_CAP", "20"))
    BRUTE_FORCE_MAX_N: int = int(os.getenv("BRUTE_FORCE_MAX_N", "24"))
    CROSSCHECK_MAX_N: int = int(os.getenv("CROSSCHECK_MAX_N", "10"))

    SWEEP_HOP_LIMIT: int = int(os.getenv("SWEEP_HOP_LIMIT", "10000"))

    # Grid oracle (float mode, scipy HiGHS)
    GRID_POINTS: int = int(os.getenv("GRID_POINTS", "1000"))
    BISECTION_TOL: float = float(os.getenv("BISECTION_TOL", "1e-6"))
    ORACLE_TOL: float = float(os.getenv("ORACLE_TOL", "1e-6"))
    ORACLE_WORKERS: int = int(os.getenv("ORACLE_WORKERS", "1"))

    BENCH_WORKERS: int = int(os.getenv("BENCH_WORKERS", "1"))
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")


settings = Settings()
