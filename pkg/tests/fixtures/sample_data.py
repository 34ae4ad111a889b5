"""
Test fixtures and sample data for debranges-lab testing.
"""
import numpy as np

from core.hardy import RationalFunction, TaylorCoeffs
from core.operators import OperatorMatrix

SQRT_HALF = 1.0 / np.sqrt(2.0)

# Sample functions b as JSON specs
B_HALF_SHIFT = {"type": "rational", "num": [0.0, SQRT_HALF], "den": [1.0]}
B_HALF_DISC = {"type": "rational", "num": [0.5, -0.5], "den": [1.0]}
B_AFFINE = {"type": "rational", "num": [0.3, 0.4], "den": [1.0]}
B_SHIFT = {"type": "rational", "num": [0.0, 1.0], "den": [1.0]}
B_TAYLOR = {"type": "taylor", "coeffs": [0.0, SQRT_HALF]}
B_ZERO = {"type": "rational", "num": [0.0], "den": [1.0]}

# Sample *-inner rows
PAIR_SHIFT = {
    "type": "pair",
    "phi1": {"type": "rational", "num": [SQRT_HALF]},
    "phi2": {"type": "rational", "num": [0.0, SQRT_HALF]},
}
PAIR_DOUBLE_ZERO = {
    "type": "pair",
    "phi1": {"type": "rational", "num": [0.0, SQRT_HALF]},
    "phi2": {"type": "rational", "num": [0.0, 0.0, SQRT_HALF]},
}
PAIR_NOT_INNER = {
    "type": "pair",
    "phi1": {"type": "rational", "num": [0.5]},
    "phi2": {"type": "rational", "num": [0.0, 0.5]},
}

# Contractions that are far from every Y_b (C1 fails); entries are row-major [re, im]
OPERATOR_HALF_IDENTITY = {
    "dim_in": 3,
    "dim_out": 3,
    "entries": [[0.5, 0.0], 0, 0, 0, [0.5, 0.0], 0, 0, 0, [0.5, 0.0]],
    "labels": {"domain": "H", "codomain": "H"},
}
OPERATOR_HALF_2X2 = {
    "dim_in": 2,
    "dim_out": 2,
    "entries": [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],
    "labels": {"domain": "H", "codomain": "H"},
}
# Older nested-rows form, still read
OPERATOR_HALF_IDENTITY_ROWS = {
    "type": "operator",
    "entries": [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]],
}

SPECS = {
    "b_half_shift": B_HALF_SHIFT,
    "b_half_disc": B_HALF_DISC,
    "b_affine": B_AFFINE,
    "b_shift": B_SHIFT,
    "b_taylor": B_TAYLOR,
    "b_zero": B_ZERO,
    "pair_shift": PAIR_SHIFT,
    "pair_double_zero": PAIR_DOUBLE_ZERO,
    "pair_not_inner": PAIR_NOT_INNER,
    "operator_half_identity": OPERATOR_HALF_IDENTITY,
    "operator_half_2x2": OPERATOR_HALF_2X2,
}


def half_shift_b():
    """b = z / sqrt(2); its mate is the constant 1 / sqrt(2)."""
    return RationalFunction.polynomial([0.0, SQRT_HALF])


def half_disc_b():
    """b = (1 - z) / 2; its mate is (1 + z) / 2."""
    return RationalFunction.polynomial([0.5, -0.5])


def affine_b():
    return RationalFunction.polynomial([0.3, 0.4])


def taylor_half_shift_b(order=8):
    coeffs = np.zeros(order, dtype=complex)
    coeffs[1] = SQRT_HALF
    return TaylorCoeffs(coeffs)


def inner_pair():
    """The row (1/sqrt(2), z/sqrt(2)), characteristic function of Y_b for b = z/sqrt(2)."""
    return RationalFunction.constant(SQRT_HALF), RationalFunction.polynomial([0.0, SQRT_HALF])


def double_zero_pair():
    """(z, z^2)/sqrt(2): shares the inner factor z, so C3 fails."""
    return RationalFunction.polynomial([0.0, SQRT_HALF]), RationalFunction.polynomial([0.0, 0.0, SQRT_HALF])


def blaschke_pair(a):
    """(z^2, (z - a)/(1 - a z)) / sqrt(2): C3 holds, C4 fails for small a."""
    phi1 = RationalFunction.polynomial([0.0, 0.0, SQRT_HALF])
    phi2 = RationalFunction(np.array([-a, 1.0]) * SQRT_HALF, [1.0, -a])
    return phi1, phi2


def sample_operator():
    return OperatorMatrix(0.5 * np.eye(3), contraction=True)


def random_unit_vector(rng, size=2):
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return v / np.linalg.norm(v)
