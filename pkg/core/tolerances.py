"""
Named numerical tolerances of one run.

Every field can be overridden from the command line with --tol NAME=VALUE.
Core functions called without a Tolerances value use DEFAULT_TOLERANCES,
which is also where the module-level constants of core take their values.
"""

from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class Tolerances:
    analytic: float = 1e-8
    extremality_floor: float = 1e-14
    extremality_threshold: float = -25.0
    clip_limit: float = 0.02
    defect_rank: float = 1e-7
    kernel: float = 1e-7
    contraction_slack: float = 1e-9
    not_contraction: float = 1e-8
    zero_match: float = 1e-7
    star_inner_build: float = 1e-8
    star_inner_gate: float = 1e-6
    coincide: float = 1e-6
    stability: float = 1e-6
    svd_cutoff: float = 1e-8
    rational_fit: float = 1e-8
    isometry_failure: float = 1e-6
    near_boundary: float = 0.97

    @classmethod
    def names(cls):
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_mapping(cls, values):
        """
        Tolerances from a name -> value mapping; missing names keep their default.

        Raises:
            ValueError: for names that are not tolerances
        """
        unknown = sorted(set(values) - set(cls.names()))
        if unknown:
            raise ValueError(f"unknown tolerance(s) {', '.join(unknown)}; known: {', '.join(cls.names())}")
        return cls(**{name: float(value) for name, value in values.items()})

    def extremality(self):
        """Keyword arguments of factorization.extremality_test."""
        return {
            "floor": self.extremality_floor,
            "threshold": self.extremality_threshold,
            "clip_limit": self.clip_limit,
        }

    def to_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
