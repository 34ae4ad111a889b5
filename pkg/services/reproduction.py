"""
Reproductions of the worked examples and the exploratory outer-combination scan.

example_4: the pair (z^2, (z - a)/(1 - a z)) / sqrt(2) has no outer unit
combination for small a. Zero counts of phi1 + alpha phi2 are taken by the
argument principle in three regimes and the C4 search is run.

section_8: b1 = z/sqrt(2) and b2 = (1 - z)/2 have coinciding characteristic
rows; the unitary relating them is recovered.

question8: for a nonextreme b with mate a, list the unit pairs (alpha, beta)
with beta != 0 for which alpha a + beta b is outer. Exploratory only.
"""

import numpy as np

from core.conditions import (
    Status,
    check_C4_outer_search,
    outer_combination_grid,
    reconstruct_b,
)
from core.dbr_model import build_model, char_fn_of_model, closed_form_row
from core.exceptions import ExtremeInput, LabError
from core.factorization import (
    extremality_test,
    pythagorean_mate,
    rational_mate,
    zero_count_in_disc,
)
from core.hardy import RationalFunction, TaylorCoeffs, combine, synthesize, to_taylor
from core.operators import closed_form_samples, coincide
from utils.logging import get_logger

logger = get_logger(__name__)

# Example 4
EXAMPLE_4_PARAMETERS = (0.01, 0.05, 0.1)
UNIMODULAR_SAMPLES = 360
INNER_RADIUS = 0.5
SMALL_RADIUS = 0.25
ROUCHE_RADIUS = 0.99
SMALL_ALPHA = 0.5
LARGE_ALPHA = 2.0

# Section 8
SECTION_8_TARGET = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
SECTION_8_RESIDUAL = 1e-2

# Question 8
QUESTION_8_GRID = 90
HEURISTIC_RADIUS = 0.99
MAX_LISTED_CELLS = 50

SQRT_HALF = 1.0 / np.sqrt(2.0)


def example_4_pair(a):
    phi1 = RationalFunction.polynomial([0.0, 0.0, SQRT_HALF])
    phi2 = RationalFunction(np.array([-a, 1.0]) * SQRT_HALF, [1.0, -a])
    return phi1, phi2


def _counts(phi1, phi2, alphas, radius):
    counts = []
    for alpha in alphas:
        try:
            counts.append(zero_count_in_disc(combine([1.0, alpha], [phi1, phi2]), radius))
        except LabError as e:
            logger.warning(f"zero count failed for alpha={alpha:.4f} on |z|={radius}: {e}")
            counts.append(None)
    return counts


def example_4(config):
    """Zero-count regimes and the C4 verdict for each parameter a."""
    tols = config.numerics()
    angles = 2 * np.pi * np.arange(UNIMODULAR_SAMPLES) / UNIMODULAR_SAMPLES
    unimodular = np.exp(1j * angles)
    cases = []
    for a in EXAMPLE_4_PARAMETERS:
        phi1, phi2 = example_4_pair(a)
        small = _counts(phi1, phi2, SMALL_ALPHA * unimodular, ROUCHE_RADIUS)
        large = _counts(phi1, phi2, LARGE_ALPHA * unimodular, ROUCHE_RADIUS)
        half = _counts(phi1, phi2, unimodular, INNER_RADIUS)
        quarter = _counts(phi1, phi2, unimodular, SMALL_RADIUS)
        c4 = check_C4_outer_search(
            phi1,
            phi2,
            theta_grid=config.theta_grid,
            psi_grid=config.psi_grid,
            threads=config.threads,
            tols=tols,
        )
        known_half = [c for c in half if c is not None]
        known_quarter = [c for c in quarter if c is not None]
        case = {
            "a": a,
            "small_alpha": {"modulus": SMALL_ALPHA, "radius": ROUCHE_RADIUS, "counts": sorted(set(c for c in small if c is not None))},
            "large_alpha": {"modulus": LARGE_ALPHA, "radius": ROUCHE_RADIUS, "counts": sorted(set(c for c in large if c is not None))},
            "unimodular_half_radius": {
                "radius": INNER_RADIUS,
                "min_count": min(known_half) if known_half else None,
                "all_at_least_one": bool(known_half) and len(known_half) == len(half) and min(known_half) >= 1,
            },
            "unimodular_quarter_radius": {
                "radius": SMALL_RADIUS,
                "min_count": min(known_quarter) if known_quarter else None,
            },
            "c4": c4.to_dict(),
        }
        logger.info(f"example 4, a={a}: min count on |z|=1/2 is {case['unimodular_half_radius']['min_count']}, C4 {c4.status.value}")
        cases.append(case)
    return {"name": "example-4", "cases": cases, "all_c4_fail": all(c["c4"]["status"] == Status.FAIL.value for c in cases)}


def _phase_aligned_error(found, target):
    overlap = np.vdot(found, target)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(found * phase - target))), phase


def section_8(config):
    """
    Both models, their coincidence, and the recovered unitary.

    The coincidence of the computed characteristic functions is reported
    next to the coincidence of the closed-form rows. The unitary tau' is read
    off the closed forms, and again off the computed functions after moving
    their coincidence into the closed-form frames of the two models.
    """
    N = config.truncation
    tols = config.numerics()
    b1 = RationalFunction.polynomial([0.0, SQRT_HALF])
    b2 = RationalFunction.polynomial([0.5, -0.5])
    m1 = build_model(b1, N, grid_size=config.grid_size, tols=tols)
    m2 = build_model(b2, N, grid_size=config.grid_size, tols=tols)
    cf1 = char_fn_of_model(m1, tols=tols)
    cf2 = char_fn_of_model(m2, tols=tols)

    computed = coincide(cf1.computed, cf2.computed, tol=tols.coincide)
    closed = coincide(
        closed_form_samples(closed_form_row(m1)),
        closed_form_samples(closed_form_row(m2)),
        tol=tols.coincide,
    )
    error, phase = _phase_aligned_error(closed.tau_prime, SECTION_8_TARGET)

    # closed_i ~ s_i computed_i t_i, so the closed-frame tau' is t_1^* t t_2
    framed = cf1.coincidence.tau_prime.conj().T @ computed.tau_prime @ cf2.coincidence.tau_prime
    computed_error, _ = _phase_aligned_error(framed, SECTION_8_TARGET)
    tau_prime = closed.tau_prime * phase
    alpha, beta = complex(tau_prime[0, 0]), complex(tau_prime[1, 0])
    gamma, delta = np.conj(beta), -np.conj(alpha)

    # b2 from the pair of b1 and the combination (alpha, beta)
    phi1, phi2 = closed_form_row(m1)
    rebuilt = reconstruct_b(phi1, phi2, alpha, beta, tols)
    target = synthesize(b2, config.grid_size).samples
    got = synthesize(rebuilt, config.grid_size).samples
    rebuilt_error, _ = _phase_aligned_error(got, target)

    logger.info(
        f"section 8: computed residual {computed.residual:.2e}, tau' error {error:.2e} (closed form), "
        f"{computed_error:.2e} (computed)"
    )
    return {
        "name": "section-8",
        "truncation": N,
        "computed_coincidence": computed.to_dict(),
        "computed_within_bound": bool(computed.residual < SECTION_8_RESIDUAL),
        "closed_form_coincidence": closed.to_dict(),
        "tau_prime_error": error,
        "computed_tau_prime_error": computed_error,
        "completion": {
            "alpha": [alpha.real, alpha.imag],
            "beta": [beta.real, beta.imag],
            "gamma": [gamma.real, gamma.imag],
            "delta": [delta.real, delta.imag],
        },
        "b2_reconstruction_error": rebuilt_error,
    }


def question8(b, config, theta_grid=None, psi_grid=None):
    """
    Scan unit pairs (alpha, beta) for outer alpha a + beta b.

    Rational b is handled exactly over the common denominator. Taylor b is
    scanned by zero counting on |z| = 0.99 and the report is flagged
    heuristic.

    Raises:
        ExtremeInput: when b is extreme
    """
    theta_grid = int(theta_grid or QUESTION_8_GRID)
    psi_grid = int(psi_grid or QUESTION_8_GRID)
    tols = config.numerics()
    if isinstance(b, RationalFunction):
        a = rational_mate(b, size=config.grid_size, tols=tols)
        thetas, psis, _, counts = outer_combination_grid(a, b, theta_grid, psi_grid, config.threads)
        heuristic = False
    else:
        grid = synthesize(b, config.grid_size)
        verdict = extremality_test(grid, **tols.extremality())
        if verdict.is_extreme:
            raise ExtremeInput("b is an extreme point; it has no Pythagorean mate", **verdict.to_dict())
        a = pythagorean_mate(grid, size=grid.size, tols=tols)
        thetas, psis, counts = _heuristic_grid(a, to_taylor(b, a.order), theta_grid, psi_grid)
        heuristic = True

    outer = counts == 0
    cells = [
        {"alpha": float(np.cos(thetas[i])), "beta": [float(np.sin(thetas[i]) * np.cos(psis[k])), float(np.sin(thetas[i]) * np.sin(psis[k]))]}
        for i, k in np.argwhere(outer)
        if thetas[i] > 0
    ]
    logger.info(f"question 8: {len(cells)} outer cells with beta != 0 on a {theta_grid}x{psi_grid} grid")
    return {
        "name": "question8",
        "exploratory": True,
        "heuristic": heuristic,
        "theta_grid": theta_grid,
        "psi_grid": psi_grid,
        "outer_cells_beta_nonzero": len(cells),
        "cells": cells[:MAX_LISTED_CELLS],
        "beta_zero_outer": bool(np.all(outer[0])),
    }


def _heuristic_grid(a, b, theta_grid, psi_grid):
    thetas = np.linspace(0.0, np.pi / 2, theta_grid)
    psis = 2 * np.pi * np.arange(psi_grid) / psi_grid
    counts = np.zeros((theta_grid, psi_grid), dtype=int)
    for i, theta in enumerate(thetas):
        for k, psi in enumerate(psis):
            f = TaylorCoeffs(np.cos(theta) * a.coeffs + np.sin(theta) * np.exp(1j * psi) * b.coeffs)
            try:
                counts[i, k] = zero_count_in_disc(f, HEURISTIC_RADIUS)
            except LabError:
                counts[i, k] = -1
    return thetas, psis, counts
