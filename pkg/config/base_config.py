"""
Base configuration for debranges-lab.
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_int(name, default):
    return int(os.getenv(name, default))


class BaseConfig:
    """Base configuration with common settings."""

    # Application info
    APP_NAME = "debranges-lab"
    APP_VERSION = "0.1.0"

    # Truncation and grids
    TRUNCATION = _env_int("DEBRANGES_LAB_TRUNCATION", 128)
    GRID_SIZE = _env_int("DEBRANGES_LAB_GRID", 4096)
    C4_THETA_GRID = _env_int("DEBRANGES_LAB_C4_THETA", 720)
    C4_PSI_GRID = _env_int("DEBRANGES_LAB_C4_PSI", 720)
    TILDE_MODES = _env_int("DEBRANGES_LAB_TILDE_MODES", 0)  # 0 means N

    # Runs
    SEED = _env_int("DEBRANGES_LAB_SEED", 0)
    THREADS = _env_int("DEBRANGES_LAB_THREADS", 1)
    OUTPUT_FORMAT = os.getenv("DEBRANGES_LAB_FORMAT", "json")

    # Numerical tolerances (overridable per run with --tol NAME=VAL)
    TOLERANCES = {
        "analytic": 1e-8,
        "extremality_floor": 1e-14,
        "extremality_threshold": -25.0,
        "clip_limit": 0.02,
        "defect_rank": 1e-7,
        "kernel": 1e-7,
        "contraction_slack": 1e-9,
        "not_contraction": 1e-8,
        "zero_match": 1e-7,
        "star_inner_build": 1e-8,
        "star_inner_gate": 1e-6,
        "coincide": 1e-6,
        "stability": 1e-6,
        "svd_cutoff": 1e-8,
        "rational_fit": 1e-8,
        "isometry_failure": 1e-6,
        "near_boundary": 0.97,
    }

    # Tolerances that are signed or fractions rather than positive thresholds
    SIGNED_TOLERANCES = ("extremality_threshold",)

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "logs/debranges_lab.log")
    LOG_MAX_BYTES = int(os.getenv("LOG_MAX_BYTES", 10485760))  # 10MB
    LOG_BACKUP_COUNT = int(os.getenv("LOG_BACKUP_COUNT", 3))
    LOG_FORMAT = os.getenv("LOG_FORMAT", "text")

    @classmethod
    def init_app(cls, app=None):
        os.makedirs(os.path.dirname(cls.LOG_FILE) or ".", exist_ok=True)

    @classmethod
    def validate(cls):
        """Validate numeric defaults."""
        problems = []
        for name in ("TRUNCATION", "GRID_SIZE"):
            value = getattr(cls, name)
            if value < 1 or value & (value - 1):
                problems.append(f"{name} must be a power of two, got {value}")
        for name, value in cls.TOLERANCES.items():
            if name not in cls.SIGNED_TOLERANCES and value <= 0:
                problems.append(f"tolerance {name} must be positive, got {value}")
        if cls.THREADS < 1:
            problems.append(f"THREADS must be at least 1, got {cls.THREADS}")
        if problems:
            raise ValueError("; ".join(problems))
        return cls

    @classmethod
    def get_config_summary(cls):
        """Get a summary of current configuration (safe for logging)."""
        return {
            "app_name": cls.APP_NAME,
            "app_version": cls.APP_VERSION,
            "log_level": cls.LOG_LEVEL,
            "truncation": cls.TRUNCATION,
            "grid_size": cls.GRID_SIZE,
            "threads": cls.THREADS,
            "c4_grid": [cls.C4_THETA_GRID, cls.C4_PSI_GRID],
        }
