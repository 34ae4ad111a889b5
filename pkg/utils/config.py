"""
Run configuration for debranges-lab.

RunConfig gathers the numeric defaults of the active config class (see the
``config`` package) and the command-line overrides of one run.
"""

from dataclasses import asdict, dataclass, field, replace

from config import Config
from core.tolerances import Tolerances


def _is_power_of_two(n):
    return n >= 1 and not n & (n - 1)


@dataclass(frozen=True)
class RunConfig:
    truncation: int = 128
    grid_size: int = 4096
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    output: str = None
    format: str = "json"
    theta_grid: int = 720
    psi_grid: int = 720
    tilde_modes: int = 0

    @classmethod
    def from_config(cls, config_class=None):
        """Defaults from the active config class."""
        cfg = config_class or Config
        return cls(
            truncation=cfg.TRUNCATION,
            grid_size=cfg.GRID_SIZE,
            tolerances=dict(cfg.TOLERANCES),
            seed=cfg.SEED,
            threads=cfg.THREADS,
            format=cfg.OUTPUT_FORMAT,
            theta_grid=cfg.C4_THETA_GRID,
            psi_grid=cfg.C4_PSI_GRID,
            tilde_modes=cfg.TILDE_MODES,
        )

    def with_overrides(self, tolerance_overrides=None, **changes):
        """
        Copy with CLI overrides applied.

        Args:
            tolerance_overrides: iterable of "NAME=VALUE" strings
            **changes: field values; None leaves the field unchanged

        Raises:
            ValueError: for unknown tolerance names or malformed values
        """
        tolerances = dict(self.tolerances)
        for item in tolerance_overrides or ():
            name, sep, value = item.partition("=")
            name = name.strip()
            if not sep or not name:
                raise ValueError(f"tolerance override must look like NAME=VALUE, got {item!r}")
            if name not in tolerances:
                raise ValueError(f"unknown tolerance {name!r}; known: {', '.join(sorted(tolerances))}")
            tolerances[name] = float(value)
        updates = {k: v for k, v in changes.items() if v is not None}
        return replace(self, tolerances=tolerances, **updates)

    def tol(self, name):
        return self.tolerances[name]

    def numerics(self):
        """Tolerances value handed to the core functions."""
        return Tolerances.from_mapping(self.tolerances)

    def validate(self):
        """
        Check powers of two and positive tolerances.

        Raises:
            ValueError: listing every problem found
        """
        problems = []
        if not _is_power_of_two(self.truncation):
            problems.append(f"truncation must be a power of two, got {self.truncation}")
        if not _is_power_of_two(self.grid_size):
            problems.append(f"grid size must be a power of two, got {self.grid_size}")
        for name, value in self.tolerances.items():
            if name != "extremality_threshold" and value <= 0:
                problems.append(f"tolerance {name} must be positive, got {value}")
        if self.threads < 1:
            problems.append(f"threads must be at least 1, got {self.threads}")
        if self.format not in ("json", "csv"):
            problems.append(f"format must be json or csv, got {self.format}")
        if self.theta_grid < 1 or self.psi_grid < 1:
            problems.append("C4 grid sizes must be positive")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def to_dict(self):
        return asdict(self)
