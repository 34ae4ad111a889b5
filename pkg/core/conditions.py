"""
Checks of the four conditions that characterize the operators Y_b.

  C1  dim D_T = 2, dim D_T* = dim ker T = 1
  C2  T^n -> 0 strongly
  C3  the characteristic row has no common inner divisor
  C4  some unit combination a1 phi1 + a2 phi2 of the row is outer

C3 and C4 are decided exactly for rational rows. An operator given only as
a matrix gets a rational fit of its characteristic function first; without
a good fit both checks stay undecided.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.optimize
from numpy.polynomial import polynomial as P

from core.exceptions import (
    LabError,
    NotPure,
    NotStarInner,
    NotUnitaryCompletion,
    PoleNearCircle,
)
from core.dilation import xi_for_target_e
from core.factorization import (
    DISC_MARGIN,
    common_inner_divisor_rational,
    disc_zeros,
    extremality_test,
)
from core.hardy import (
    COEFF_TRIM,
    RationalFunction,
    combine,
    companion_roots_batch,
    poly_roots,
    synthesize,
    tilde,
    trim_polynomial,
)
from core.operators import (
    OperatorMatrix,
    build_from_inner_column,
    char_fn_eval,
    closed_form_samples,
    defect,
    is_pure_row,
    kernel_dim,
    star_inner_deviation,
    strong_stability_check,
)
from core.tolerances import DEFAULT_TOLERANCES
from utils.logging import get_logger

logger = get_logger(__name__)

# Gates and grids
STAR_INNER_GATE = DEFAULT_TOLERANCES.star_inner_gate
DEFAULT_C4_GRID = 720
MAX_REFINEMENTS = 8
LEADING_TRIM = 1e-12

# Completion and fitting
COMPLETION_TOL = 1e-8
COMPLETION_GRID = 4096
FIT_TOL = DEFAULT_TOLERANCES.rational_fit
MAX_FIT_DEGREE = 12
FIT_RADII = (0.3, 0.5, 0.7)
FIT_POINTS_PER_CIRCLE = 32

STABILITY_TOL = DEFAULT_TOLERANCES.stability
DEFAULT_TRUNCATION = 64


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNDECIDED = "undecided"


class Verdict(str, Enum):
    EQUIVALENT = "equivalent_to_some_Yb"
    NOT_EQUIVALENT = "not_equivalent"
    UNDECIDED = "undecided"

    @property
    def exit_code(self):
        return {"equivalent_to_some_Yb": 0, "not_equivalent": 1, "undecided": 2}[self.value]


@dataclass(frozen=True)
class ConditionResult:
    name: str
    status: Status
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status is Status.PASS

    def to_dict(self):
        return {"condition": self.name, "status": self.status.value, **self.details}


@dataclass(frozen=True, eq=False)
class ContractionDiagnostics:
    c1: ConditionResult
    c2: ConditionResult
    c3: ConditionResult
    c4: ConditionResult
    verdict: Verdict
    reconstructed_b: Optional[RationalFunction] = None
    pair: Optional[tuple] = None

    def to_dict(self):
        report = {
            "c1": self.c1.to_dict(),
            "c2": self.c2.to_dict(),
            "c3": self.c3.to_dict(),
            "c4": self.c4.to_dict(),
            "verdict": self.verdict.value,
        }
        if self.reconstructed_b is not None:
            report["reconstructed_b"] = {
                "num": _pairs(self.reconstructed_b.num),
                "den": _pairs(self.reconstructed_b.den),
            }
        return report


def _pairs(values):
    return [[float(complex(z).real), float(complex(z).imag)] for z in np.atleast_1d(values)]


def check_C1(T, tols=DEFAULT_TOLERANCES):
    profile = (
        defect(T, tols.defect_rank, tols.not_contraction).rank,
        defect(T.adjoint(), tols.defect_rank, tols.not_contraction).rank,
        kernel_dim(T, tols.kernel),
    )
    status = Status.PASS if profile == (2, 1, 1) else Status.FAIL
    return ConditionResult(
        "C1",
        status,
        {"defect_dim": profile[0], "codefect_dim": profile[1], "kernel_dim": profile[2]},
    )


def check_C2(T, n_max, tol=STABILITY_TOL):
    result = strong_stability_check(T, n_max, tol)
    return ConditionResult("C2", Status.PASS if result.stable else Status.FAIL, result.to_dict())


def _star_inner_gate(phi1, phi2, tol=STAR_INNER_GATE):
    deviation = star_inner_deviation(phi1, phi2)
    if deviation > tol:
        logger.error(f"pair rejected: |phi1|^2 + |phi2|^2 deviates from 1 by {deviation:.3e}")
        raise NotStarInner(f"pair is not *-inner (deviation {deviation:.3e})", deviation=deviation)
    return deviation


def check_C3_rational(phi1, phi2, tols=DEFAULT_TOLERANCES):
    """
    C3 for a rational *-inner row: no common zero of phi1 and phi2 in the disc.

    A common inner divisor of phi1~ and phi2~ is the tilde of one of phi1
    and phi2 (zeros reflect through the real axis), so the row itself is
    tested. Zeros closer than ``tols.zero_match`` count as shared.

    Raises:
        NotStarInner: when the pair misses *-inner by more than ``tols.star_inner_gate``
    """
    _star_inner_gate(phi1, phi2, tols.star_inner_gate)
    if phi1.is_zero() or phi2.is_zero():
        other = phi2 if phi1.is_zero() else phi1
        zeros = disc_zeros(other)
        shared = [(complex(z), complex(z)) for z in zeros]
        trivial = not shared
    else:
        verdict = common_inner_divisor_rational(phi1, phi2, tols.zero_match)
        shared, trivial = verdict.shared, verdict.trivial
    details = {"shared_zeros": [_pairs(z)[0] for z, _ in shared]}
    if not trivial:
        logger.info(f"C3 fails: {len(shared)} shared zero(s), the row splits off a scalar model piece")
    return ConditionResult("C3", Status.PASS if trivial else Status.FAIL, details)


def _cross_numerators(phi1, phi2):
    p1 = P.polymul(phi1.num, phi2.den)
    p2 = P.polymul(phi2.num, phi1.den)
    width = max(p1.size, p2.size)
    return np.pad(p1, (0, width - p1.size)), np.pad(p2, (0, width - p2.size))


def _innermost(row, margin=DISC_MARGIN):
    """(innermost zero modulus, zeros in the disc) of one numerator row."""
    c = trim_polynomial(row, COEFF_TRIM)
    if not np.any(c):
        return 0.0, -1
    if c.size < 2:
        return np.inf, 0
    moduli = np.abs(poly_roots(c).roots)
    return float(np.min(moduli)), int(np.sum(moduli < 1.0 - margin))


def _scan_row(theta, psis, p1, p2, margin=DISC_MARGIN):
    """Innermost zero moduli and disc zero counts along one theta row."""
    weights = np.sin(theta) * np.exp(1j * psis)
    rows = np.cos(theta) * p1[None, :] + weights[:, None] * p2[None, :]
    scale = np.max(np.abs(rows), axis=1)
    degree_drops = np.abs(rows[:, -1]) <= LEADING_TRIM * np.maximum(scale, np.finfo(float).tiny)
    innermost = np.full(psis.size, np.inf)
    counts = np.zeros(psis.size, dtype=int)
    regular = ~degree_drops
    if rows.shape[1] > 1 and np.any(regular):
        moduli = np.abs(companion_roots_batch(rows[regular]))
        innermost[regular] = np.min(moduli, axis=1)
        counts[regular] = np.sum(moduli < 1.0 - margin, axis=1)
    for k in np.flatnonzero(degree_drops | (rows.shape[1] == 1)):
        innermost[k], counts[k] = _innermost(rows[k], margin)
    return innermost, counts


def outer_combination_grid(phi1, phi2, theta_grid, psi_grid, threads=1):
    """
    Innermost zero modulus and disc zero count of cos(t) phi1 + sin(t) e^{is} phi2.

    t runs over theta_grid points of [0, pi/2], s over psi_grid points of
    [0, 2 pi). Rows are computed on a thread pool and assembled in grid
    order. A count of -1 marks the zero combination.
    """
    p1, p2 = _cross_numerators(phi1, phi2)
    thetas = np.linspace(0.0, np.pi / 2, int(theta_grid))
    psis = 2 * np.pi * np.arange(int(psi_grid)) / int(psi_grid)

    rows = {}
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as executor:
        future_to_index = {executor.submit(_scan_row, theta, psis, p1, p2): i for i, theta in enumerate(thetas)}
        for future in as_completed(future_to_index):
            rows[future_to_index[future]] = future.result()

    innermost = np.vstack([rows[i][0] for i in range(thetas.size)])
    counts = np.vstack([rows[i][1] for i in range(thetas.size)])
    return thetas, psis, innermost, counts


def _alpha_pair(theta, psi):
    return complex(np.cos(theta)), complex(np.sin(theta) * np.exp(1j * psi))


def _refine(theta, psi, p1, p2):
    def objective(x):
        modulus, count = _innermost(np.cos(x[0]) * p1 + np.sin(x[0]) * np.exp(1j * x[1]) * p2)
        return -min(modulus, 2.0) if count >= 0 else 0.0

    found = scipy.optimize.minimize(
        objective,
        x0=[theta, psi],
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400},
    )
    return float(found.x[0]), float(found.x[1]), -float(found.fun)


def _xi_witness(phi1, phi2, alpha1, alpha2):
    value0 = np.array([phi1.evaluate(0.0), phi2.evaluate(0.0)], dtype=complex)
    alpha = float(np.linalg.norm(value0))
    if not 0.0 < alpha < 1.0:
        return None
    eta = np.array([alpha1, alpha2], dtype=complex)
    try:
        xi, residual = xi_for_target_e(alpha, eta / np.linalg.norm(eta))
    except LabError as e:
        logger.warning(f"no xi witness for the outer combination: {e}")
        return None
    return {"alpha": alpha, "xi": _pairs(xi), "residual": residual}


def check_C4_outer_search(
    phi1, phi2, theta_grid=DEFAULT_C4_GRID, psi_grid=DEFAULT_C4_GRID, threads=1, tols=DEFAULT_TOLERANCES
):
    """
    C4: look for (a1, a2) = (cos t, sin t e^{i s}) making a1 phi1 + a2 phi2 outer.

    The scan covers t in [0, pi/2] and s in [0, 2 pi). Each theta row is one
    batched root computation on the numerators over a common denominator;
    rows run on a thread pool and the first hit in lexicographic (t, s)
    order wins. Near misses (innermost zero beyond ``tols.near_boundary``,
    0.97 by default) are refined by a local search; when no hit turns up but
    a near miss survives, the result is undecided.

    Raises:
        NotStarInner: when the pair misses *-inner by more than ``tols.star_inner_gate``
        NotPure: when the row coincides with a constant (0, kappa)
    """
    _star_inner_gate(phi1, phi2, tols.star_inner_gate)
    near_boundary = tols.near_boundary
    if not is_pure_row(closed_form_samples([phi1, phi2]), tols.coincide):
        raise NotPure("the row coincides with a constant (0, kappa)")

    p1, p2 = _cross_numerators(phi1, phi2)
    thetas, psis, innermost, counts = outer_combination_grid(phi1, phi2, theta_grid, psi_grid, threads)
    valid = counts >= 0
    hits = np.argwhere(valid & (counts == 0))
    details = {
        "theta_grid": int(theta_grid),
        "psi_grid": int(psi_grid),
        "min_zero_count": int(np.min(np.where(valid, counts, np.iinfo(int).max))),
        "max_innermost_modulus": float(np.max(np.where(valid & np.isfinite(innermost), innermost, 0.0))),
    }

    if hits.size:
        i, k = (int(x) for x in hits[0])
        alpha1, alpha2 = _alpha_pair(thetas[i], psis[k])
        return _c4_pass(phi1, phi2, alpha1, alpha2, details, refined=False)

    near = np.argwhere(valid & (innermost > near_boundary))
    if near.size:
        order = np.argsort(-innermost[near[:, 0], near[:, 1]], kind="stable")[:MAX_REFINEMENTS]
        best = 0.0
        for i, k in near[order]:
            theta, psi, modulus = _refine(thetas[i], psis[k], p1, p2)
            best = max(best, modulus)
            if modulus >= 1.0 - DISC_MARGIN:
                alpha1, alpha2 = _alpha_pair(theta, psi)
                return _c4_pass(phi1, phi2, alpha1, alpha2, details, refined=True)
        details["refined_innermost_modulus"] = best
        logger.warning(f"C4 undecided: best combination keeps a zero at modulus {best:.6f}")
        return ConditionResult("C4", Status.UNDECIDED, details)

    logger.info(f"C4 fails on the {theta_grid}x{psi_grid} grid: every combination has a zero in the disc")
    return ConditionResult("C4", Status.FAIL, details)


def _c4_pass(phi1, phi2, alpha1, alpha2, details, refined):
    details = dict(details)
    details["alpha"] = _pairs([alpha1, alpha2])
    details["refined"] = refined
    witness = _xi_witness(phi1, phi2, alpha1, alpha2)
    if witness is not None:
        details["xi_witness"] = witness
    logger.debug(f"C4 passes with alpha = ({alpha1:.6f}, {alpha2:.6f})")
    return ConditionResult("C4", Status.PASS, details)


def reconstruct_b(phi1, phi2, alpha1, alpha2, tols=DEFAULT_TOLERANCES):
    """
    Recover b from a *-inner row and an outer combination a~ = a1 phi1 + a2 phi2.

    The unitary [[a1, -conj(a2)], [a2, conj(a1)]] completes the column, so
    b~ = -conj(a2) phi1 + conj(a1) phi2 and b(z) = conj(b~(conj z)). The
    result is exact (rational); its extremality is judged with ``tols``.

    Raises:
        NotUnitaryCompletion: when |a~|^2 + |b~|^2 = 1 fails on the grid or b comes out extreme
    """
    alpha1, alpha2 = complex(alpha1), complex(alpha2)
    a_tilde = combine([alpha1, alpha2], [phi1, phi2])
    b_tilde = combine([-np.conj(alpha2), np.conj(alpha1)], [phi1, phi2])
    a_grid = synthesize(a_tilde, COMPLETION_GRID)
    b_grid = synthesize(b_tilde, COMPLETION_GRID)
    residual = float(np.max(np.abs(a_grid.modulus() ** 2 + b_grid.modulus() ** 2 - 1.0)))
    if residual > COMPLETION_TOL:
        raise NotUnitaryCompletion(f"|a~|^2 + |b~|^2 misses 1 by {residual:.3e}", residual=residual)
    b = tilde(b_tilde)
    verdict = extremality_test(synthesize(b, COMPLETION_GRID), **tols.extremality())
    if verdict.is_extreme:
        raise NotUnitaryCompletion("reconstructed b is extreme", **verdict.to_dict())
    logger.debug(f"reconstructed b of degree {b.degree}, completion residual {residual:.2e}")
    return b


def fit_rational(points, values, max_degree=MAX_FIT_DEGREE, tol=FIT_TOL):
    """
    Linearized least-squares rational fit num/den with den(0) = 1.

    Degrees 0..max_degree are tried in turn; the first fit whose relative
    residual is within ``tol`` and whose denominator has no zeros in the
    closed disc is returned. Returns (None, best residual) otherwise.
    """
    z = np.asarray(points, dtype=complex)
    f = np.asarray(values, dtype=complex)
    scale = max(float(np.max(np.abs(f))), np.finfo(float).tiny)
    best = np.inf
    for degree in range(max_degree + 1):
        powers = z[:, None] ** np.arange(degree + 1)[None, :]
        system = np.hstack([powers, -f[:, None] * powers[:, 1:]])
        solution, *_ = np.linalg.lstsq(system, f, rcond=None)
        num = solution[: degree + 1]
        den = np.concatenate([[1.0], solution[degree + 1 :]])
        try:
            fitted = RationalFunction(num, den)
        except PoleNearCircle:
            continue
        residual = float(np.max(np.abs(fitted.evaluate(z) - f))) / scale
        best = min(best, residual)
        if residual <= tol:
            logger.debug(f"rational fit of degree {degree}: residual {residual:.2e}")
            return fitted, residual
    return None, best


def fit_char_fn_row(T, tols=DEFAULT_TOLERANCES):
    """Rational fit (within ``tols.rational_fit``) of the 1 x 2 characteristic function of T, or (None, residual)."""
    angles = 2 * np.pi * np.arange(FIT_POINTS_PER_CIRCLE) / FIT_POINTS_PER_CIRCLE
    points = np.concatenate([r * np.exp(1j * angles) for r in FIT_RADII])
    samples = char_fn_eval(T, points, tol=tols.defect_rank)
    if samples.shape != (1, 2):
        return None, np.inf
    row = []
    worst = 0.0
    for j in range(2):
        fitted, residual = fit_rational(points, samples.values[:, 0, j], tol=tols.rational_fit)
        worst = max(worst, residual)
        if fitted is None:
            logger.warning(f"no rational fit of degree <= {MAX_FIT_DEGREE} for entry {j} (residual {residual:.2e})")
            return None, worst
        row.append(fitted)
    return tuple(row), worst


def _aggregate(c1, c2, c3, c4):
    statuses = [c.status for c in (c1, c2, c3, c4)]
    if Status.FAIL in statuses:
        return Verdict.NOT_EQUIVALENT
    if all(s is Status.PASS for s in statuses):
        return Verdict.EQUIVALENT
    return Verdict.UNDECIDED


def _undecided(name, reason):
    return ConditionResult(name, Status.UNDECIDED, {"reason": reason})


def full_diagnostics(
    target,
    truncation=DEFAULT_TRUNCATION,
    n_max=None,
    theta_grid=DEFAULT_C4_GRID,
    psi_grid=DEFAULT_C4_GRID,
    threads=1,
    tols=DEFAULT_TOLERANCES,
):
    """
    Run C1-C4 on an operator or on a rational *-inner pair.

    A pair is turned into its model operator (truncation ``truncation``) for
    C1 and C2. An operator gets a rational fit of its characteristic row for
    C3 and C4; without one they are undecided. On a positive verdict b is
    reconstructed from the outer combination found by C4.

    Args:
        target: OperatorMatrix or a (phi1, phi2) pair of RationalFunction
        truncation: model truncation for pair inputs
        n_max: power used by C2 (default 4 x dimension)
        theta_grid: C4 grid size in theta
        psi_grid: C4 grid size in psi
        threads: worker threads for the C4 scan
        tols: numerical tolerances for every check

    Returns:
        ContractionDiagnostics
    """
    if isinstance(target, OperatorMatrix):
        T = target.check_contraction(tols.contraction_slack)
        pair = None
    else:
        phi1, phi2 = target
        pair = (phi1, phi2)
        T = build_from_inner_column(phi1, phi2, truncation, tol=tols.star_inner_build, coincide_tol=tols.coincide)
    n_max = 4 * T.dim_in if n_max is None else int(n_max)

    c1 = check_C1(T, tols)
    c2 = check_C2(T, n_max, tols.stability)

    if pair is None:
        if not c1.passed:
            pair_reason = "characteristic function is not a 1 x 2 row"
            fitted = None
        else:
            fitted, residual = fit_char_fn_row(T, tols)
            pair_reason = f"no rational fit within {tols.rational_fit:.0e} (residual {residual:.2e})"
        if fitted is not None:
            try:
                _star_inner_gate(*fitted, tols.star_inner_gate)
                pair = fitted
            except NotStarInner as e:
                pair_reason = str(e)
        if pair is None:
            logger.warning(f"C3/C4 undecided: {pair_reason}")
            c3 = _undecided("C3", pair_reason)
            c4 = _undecided("C4", pair_reason)
            verdict = _aggregate(c1, c2, c3, c4)
            return ContractionDiagnostics(c1, c2, c3, c4, verdict)

    c3 = check_C3_rational(*pair, tols)
    c4 = check_C4_outer_search(*pair, theta_grid=theta_grid, psi_grid=psi_grid, threads=threads, tols=tols)
    verdict = _aggregate(c1, c2, c3, c4)

    b = None
    if verdict is Verdict.EQUIVALENT:
        (alpha1, alpha2) = (complex(*x) for x in c4.details["alpha"])
        b = reconstruct_b(pair[0], pair[1], alpha1, alpha2, tols)
    logger.info(f"diagnostics: C1 {c1.status.value}, C2 {c2.status.value}, C3 {c3.status.value}, C4 {c4.status.value} -> {verdict.value}")
    return ContractionDiagnostics(c1, c2, c3, c4, verdict, b, pair)
