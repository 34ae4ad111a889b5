"""
Report service for debranges-lab.

Each handle_* function runs one subcommand on decoded input and returns a
Report: the JSON payload, the process exit code and an optional CSV table.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.conditions import full_diagnostics
from core.dbr_model import (
    build_model,
    build_tilde_model,
    char_fn_of_model,
    defect_profile,
    kernel_gram,
    no_isometric_vector_check,
)
from core.dilation import build_T_xi, char_fn_b_xi, value_at_zero
from core.exceptions import ExtremeInput
from core.factorization import extremality_test, pythagorean_mate, rational_mate
from core.hardy import BoundaryGrid, RationalFunction, synthesize, to_taylor
from core.operators import OperatorMatrix, build_from_inner_column, strong_stability_check
from data_modules.serialization import (
    encode_vector,
    function_to_dict,
    grid_table,
    operator_to_dict,
    samples_table,
    save_report,
)
from utils.logging import get_logger

logger = get_logger(__name__)

# Points for the kernel Gram cross-check
GRAM_POINTS = (0.0, 0.5, 0.5j, -0.3, 0.2 - 0.6j)
REPORTED_COEFFS = 32
DEFAULT_XI = (2 ** -0.5, 2 ** -0.5)


@dataclass
class Report:
    payload: dict
    exit_code: int = 0
    table: Optional[tuple] = None


def _grid_of(b, size):
    return b if isinstance(b, BoundaryGrid) else synthesize(b, size)


def _verdict_or_raise(grid, tols):
    verdict = extremality_test(grid, **tols.extremality())
    if verdict.is_extreme:
        logger.warning(f"b is extreme: log integral {verdict.log_integral:.3f}")
        raise ExtremeInput("b is an extreme point; it has no Pythagorean mate", **verdict.to_dict())
    return verdict


def handle_factor(b, config):
    """
    Pythagorean mate a of b with |a|^2 + |b|^2 = 1 on the circle.

    Args:
        b: RationalFunction, TaylorCoeffs or BoundaryGrid
        config: RunConfig

    Returns:
        Report with a's Taylor coefficients, the extremality verdict and the identity residual

    Raises:
        ExtremeInput: when b is extreme
    """
    size = config.grid_size
    tols = config.numerics()
    grid = _grid_of(b, size)
    verdict = _verdict_or_raise(grid, tols)

    payload = {"command": "factor", "grid_size": grid.size, "extremality": verdict.to_dict()}
    if isinstance(b, RationalFunction):
        a = rational_mate(b, size=size, tols=tols)
        a_grid = synthesize(a, size)
        payload["a_rational"] = function_to_dict(a)
        a_coeffs = to_taylor(a, min(REPORTED_COEFFS, size // 2), size=size).coeffs
    else:
        a_taylor = pythagorean_mate(grid, size=grid.size, tols=tols)
        a_grid = synthesize(a_taylor, grid.size)
        a_coeffs = a_taylor.coeffs[:REPORTED_COEFFS]
        payload["mate_residuals"] = {k: float(v) for k, v in a_taylor.residuals.items() if np.isscalar(v)}

    residual = float(np.max(np.abs(a_grid.modulus() ** 2 + grid.modulus() ** 2 - 1.0)))
    payload["a_coeffs"] = encode_vector(a_coeffs)
    payload["identity_residual"] = residual
    logger.info(f"factor: identity residual {residual:.2e}")
    return Report(payload, 0, grid_table(a_grid.samples))


def handle_model(b, config, with_tilde=False):
    """
    Build the truncated model of b and report its invariants.

    Returns:
        Report with the defect profile, residuals, convergence ledger,
        strong stability and the coincidence with the closed-form row
    """
    N = config.truncation
    tols = config.numerics()
    model = build_model(b, N, grid_size=config.grid_size, tols=tols)
    profile = defect_profile(model, tols)
    stability = strong_stability_check(model.Yb, 4 * N, tols.stability)
    cf = char_fn_of_model(model, tols=tols)

    payload = {
        "command": "model",
        "truncation": N,
        "dim_K": model.dim_K,
        "defect_profile": {"defect": profile[0], "codefect": profile[1], "kernel": profile[2]},
        "residuals": dict(model.residuals),
        "ledger": model.ledger,
        "stability": stability.to_dict(),
        "char_fn_shape": list(cf.computed.shape),
    }
    if cf.coincidence is not None:
        payload["coincidence"] = cf.coincidence.to_dict()

    gram_source = model.b_exact if model.b_exact is not None else model.b
    gram = kernel_gram(gram_source, GRAM_POINTS)
    payload["kernel_gram_min_eigenvalue"] = gram.min_eigenvalue

    if with_tilde:
        M = config.tilde_modes or N
        tilde = build_tilde_model(model, M, cutoff=tols.svd_cutoff)
        payload["tilde"] = {
            "M": M,
            "residuals": dict(tilde.residuals),
            "no_isometric_vector": no_isometric_vector_check(tilde, seed=config.seed),
        }
    return Report(payload, 0, samples_table(cf.computed))


def handle_check(target, config):
    """
    C1-C4 diagnostics for an operator or a rational *-inner pair.

    The exit code is 0, 1 or 2 for a positive, negative or undecided verdict.
    """
    diagnostics = full_diagnostics(
        target,
        truncation=config.truncation,
        theta_grid=config.theta_grid,
        psi_grid=config.psi_grid,
        threads=config.threads,
        tols=config.numerics(),
    )
    payload = {"command": "check", **diagnostics.to_dict()}
    return Report(payload, diagnostics.verdict.exit_code)


def base_operator(base, config):
    """Operator for dilation: given directly, from a pair, or the model operator of b."""
    tols = config.numerics()
    if isinstance(base, OperatorMatrix):
        return base.check_contraction(tols.contraction_slack)
    if isinstance(base, tuple):
        return build_from_inner_column(
            base[0], base[1], config.truncation, tol=tols.star_inner_build, coincide_tol=tols.coincide
        )
    return build_model(base, config.truncation, grid_size=config.grid_size, tols=tols).Yb


def handle_dilate(base, config, xi=None, m=None, operator_path=None):
    """
    Build T_xi over the base contraction and report a_xi, e_xi, ranks and b_xi.

    ``xi`` is read in the defect basis rotated so the compression of T is (alpha, 0).
    The defect ranks and the base profile in the payload are the computed ones.
    With ``operator_path`` T_xi is also saved as an operator spec that
    ``check`` reads back.
    """
    tols = config.numerics()
    T = base_operator(base, config)
    xi = np.asarray(DEFAULT_XI if xi is None else xi, dtype=complex)
    dilation = build_T_xi(T, xi, m, tols=tols)
    samples, verdict = char_fn_b_xi(dilation, tols=tols)
    at_zero = value_at_zero(dilation, tols.defect_rank)
    payload = {
        "command": "dilate",
        **dilation.to_dict(),
        "b_xi_extremality": verdict.to_dict(),
        "b_xi_max_modulus": samples.max_value_norm(),
        "b_xi_at_zero": [at_zero.real, at_zero.imag],
    }
    if operator_path:
        save_report(operator_to_dict(dilation.T_xi), operator_path)
        payload["operator_path"] = operator_path
        logger.info(f"T_xi written to {operator_path}")
    return Report(payload, 0, samples_table(samples))
