"""
Outer-function machinery.

Szego-type outer factors from a boundary modulus (cepstral method), the
Pythagorean mate a of b (grid-based, or exact Fejer-Riesz for rational b),
extremality testing, argument-principle zero counting, and the outerness and
common-inner-divisor tests for rational functions.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as P

from core.exceptions import (
    ExtremeInput,
    InsufficientSamples,
    LogNotIntegrable,
    ModulusExceedsOne,
    NoConvergence,
    ZeroNearContour,
)
from core.hardy import (
    COEFF_TRIM,
    BoundaryGrid,
    RationalFunction,
    TaylorCoeffs,
    analyze,
    poly_roots,
    require_nonzero,
    synthesize,
    to_taylor,
    trim_polynomial,
    unit_circle,
)
from core.tolerances import DEFAULT_TOLERANCES
from utils.logging import get_logger

logger = get_logger(__name__)

# Extremality surrogate for "integral of log(1-|b|^2) = -inf"
EXTREMALITY_FLOOR = DEFAULT_TOLERANCES.extremality_floor
EXTREMALITY_THRESHOLD = DEFAULT_TOLERANCES.extremality_threshold
CLIP_LIMIT = DEFAULT_TOLERANCES.clip_limit
MODULUS_SLACK = 1e-9

# Winding numbers
WINDING_SAMPLES = 4096
MAX_WINDING_SAMPLES = 2 ** 20
PHASE_STEP_LIMIT = np.pi / 2
CONTOUR_CLEARANCE = 1e-6

# Zero location
ZERO_MATCH_TOL = DEFAULT_TOLERANCES.zero_match
DISC_MARGIN = 1e-9
CIRCLE_MERGE_TOL = 1e-5

DEFAULT_GRID_SIZE = 4096


class Extremality(str, Enum):
    EXTREME = "Extreme"
    NONEXTREME = "Nonextreme"


@dataclass(frozen=True)
class ExtremalityVerdict:
    verdict: Extremality
    log_integral: float
    clipped_fraction: float

    @property
    def is_extreme(self):
        return self.verdict is Extremality.EXTREME

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "log_integral": self.log_integral,
            "clipped_fraction": self.clipped_fraction,
        }


@dataclass(frozen=True)
class DivisorVerdict:
    """Outcome of the common-inner-divisor test; ``shared`` lists matched zero pairs."""

    trivial: bool
    shared: list = field(default_factory=list)

    def to_dict(self):
        return {
            "trivial": self.trivial,
            "shared_zeros": [[z.real, z.imag] for z, _ in self.shared],
        }


def extremality_test(b, floor=EXTREMALITY_FLOOR, threshold=EXTREMALITY_THRESHOLD, clip_limit=CLIP_LIMIT):
    """
    Decide whether b is an extreme point of the unit ball of H-infinity.

    On a finite grid the log integral is never -inf; b is declared Extreme
    when the grid mean of log(max(1-|b|^2, floor)) is below ``threshold`` or
    when more than ``clip_limit`` of the samples had to be clipped. An
    isolated clipped sample (a single boundary point with |b| = 1) gets its
    cell value from the neighbouring samples instead of the floor.

    Raises:
        ModulusExceedsOne: when sup |b| > 1 + 1e-9 on the grid
    """
    modulus = b.modulus()
    sup = float(np.max(modulus))
    if sup > 1.0 + MODULUS_SLACK:
        raise ModulusExceedsOne(f"sup |b| = {sup:.12f} exceeds 1", sup=sup)
    gap = 1.0 - modulus ** 2
    clipped = gap < floor
    fraction = float(np.mean(clipped))
    logs = _isolated_zero_logs(np.log(np.maximum(gap, floor)), clipped)
    log_integral = float(np.mean(logs))
    extreme = log_integral < threshold or fraction > clip_limit
    verdict = Extremality.EXTREME if extreme else Extremality.NONEXTREME
    logger.debug(f"extremality: log_integral={log_integral:.6f} clipped={fraction:.4f} -> {verdict.value}")
    return ExtremalityVerdict(verdict, log_integral, fraction)


def _isolated_zero_logs(logs, clipped):
    """
    Replace the floor at isolated boundary zeros of 1 - |b|^2.

    Near such a zero the gap behaves like c |2 sin((t - t0) / 2)|^2; the
    sample value log(gap(t0 +- h)) - 2 log(2 pi) makes the grid mean exact
    for that model. Runs of clipped samples are left at the floor.
    """
    isolated = clipped & ~np.roll(clipped, 1) & ~np.roll(clipped, -1)
    if not np.any(isolated) or np.all(clipped):
        return logs
    neighbours = 0.5 * (np.roll(logs, 1) + np.roll(logs, -1))
    corrected = logs.copy()
    corrected[isolated] = neighbours[isolated] - 2.0 * np.log(2.0 * np.pi)
    return corrected


def outer_from_modulus(w, normalize_positive=True, floor=EXTREMALITY_FLOOR, clip_limit=CLIP_LIMIT):
    """
    Outer function with boundary modulus w (cepstral method).

    log w is Fourier-analyzed, folded onto nonnegative frequencies
    (c_0 = u_0, c_k = 2 u_k), exponentiated on the grid and re-analyzed.
    Samples below sqrt(floor) are clipped.

    Args:
        w: BoundaryGrid of real nonnegative samples
        normalize_positive: rotate the result so that a(0) > 0

    Returns:
        TaylorCoeffs with residuals ``modulus_residual`` (max | |a| - w | on
        the grid), ``szego_mean`` (exp of the grid mean of log w) and
        ``clipped_fraction``

    Raises:
        LogNotIntegrable: when too many samples are clipped
    """
    values = w.samples
    modulus = values.real
    if np.max(np.abs(values.imag)) > 1e-12 * max(1.0, float(np.max(np.abs(values)))):
        raise ValueError("boundary modulus must be real")
    if np.min(modulus) < -1e-12:
        raise ValueError("boundary modulus must be nonnegative")

    w_floor = np.sqrt(floor)
    fraction = float(np.mean(modulus < w_floor))
    if fraction > clip_limit:
        raise LogNotIntegrable(
            f"{fraction:.3%} of the modulus samples vanish; log w is not integrable on this grid",
            clipped_fraction=fraction,
        )

    n = w.size
    half = n // 2
    u_hat = np.fft.fft(np.log(np.maximum(modulus, w_floor))) / n
    folded = np.zeros(n, dtype=complex)
    folded[0] = u_hat[0]
    folded[1:half] = 2.0 * u_hat[1:half]
    folded[half] = u_hat[half]
    samples = np.exp(n * np.fft.ifft(folded))

    series = analyze(BoundaryGrid(samples), tol=None)
    coeffs = series.coeffs
    if normalize_positive and abs(coeffs[0]) > 0:
        coeffs = coeffs * (abs(coeffs[0]) / coeffs[0])
    modulus_residual = float(np.max(np.abs(np.abs(samples) - np.maximum(modulus, 0.0))))
    return TaylorCoeffs(
        coeffs,
        series.neg_energy_ratio,
        {
            "modulus_residual": modulus_residual,
            "szego_mean": float(np.exp(u_hat[0].real)),
            "clipped_fraction": fraction,
        },
    )


def pythagorean_mate(b, size=DEFAULT_GRID_SIZE, tols=DEFAULT_TOLERANCES):
    """
    Outer a with |a|^2 + |b|^2 = 1 on the circle and a(0) > 0.

    Grid input goes through the cepstral factorization after an
    analyticity check at ``tols.analytic``. Rational input is factored
    exactly by ``rational_mate`` and then expanded on a grid of ``size``
    points.

    Returns:
        TaylorCoeffs whose residuals include ``pythagorean_residual`` (the
        identity on the grid values of the factor), ``truncation_residual``
        (the identity after truncating to the returned series) and
        ``extremality``

    Raises:
        ExtremeInput: when b is extreme
        NotAnalytic: when grid samples carry negative frequencies
    """
    if isinstance(b, RationalFunction):
        mate = rational_mate(b, size=size, tols=tols)
        series = to_taylor(mate, size // 2, size=size)
        grid = synthesize(b, size)
        residual = _identity_residual(synthesize(mate, size), grid)
        truncated = _identity_residual(synthesize(series, size), grid)
        return series.with_residuals(
            pythagorean_residual=residual,
            truncation_residual=truncated,
            extremality=extremality_test(grid, **tols.extremality()).to_dict(),
        )

    analyze(b, tol=tols.analytic)
    verdict = extremality_test(b, **tols.extremality())
    if verdict.is_extreme:
        raise ExtremeInput("b is an extreme point; it has no Pythagorean mate", verdict=verdict.to_dict())
    w = np.sqrt(np.maximum(1.0 - b.modulus() ** 2, 0.0))
    a = outer_from_modulus(BoundaryGrid(w), floor=tols.extremality_floor, clip_limit=tols.clip_limit)
    # | |a|^2 - w^2 | <= e (2w + e) with e = max | |a| - w | on the grid
    e = a.residuals["modulus_residual"]
    on_grid = float(np.max(e * (2.0 * w + e)))
    truncated = _identity_residual(synthesize(a, b.size), b)
    logger.debug(f"pythagorean mate: grid residual {on_grid:.2e}, truncation residual {truncated:.2e}")
    return a.with_residuals(
        pythagorean_residual=on_grid,
        truncation_residual=truncated,
        extremality=verdict.to_dict(),
    )


def _identity_residual(a_grid, b_grid):
    return float(np.max(np.abs(a_grid.modulus() ** 2 + b_grid.modulus() ** 2 - 1.0)))


def _autocorrelation(coeffs, length):
    c = np.zeros(length, dtype=complex)
    c[: coeffs.size] = coeffs
    return np.array([np.vdot(c[: length - j], c[j:]) for j in range(length)])


def _merge_circle_roots(roots):
    """Pair up roots lying on the unit circle (they occur with even multiplicity) and average each pair."""
    if roots.size % 2:
        raise NoConvergence("odd number of zeros on the unit circle in |den|^2 - |num|^2", count=int(roots.size))
    ordered = roots[np.argsort(np.angle(roots))]
    merged = 0.5 * (ordered[0::2] + ordered[1::2])
    return merged / np.abs(merged)


def rational_mate(b, size=DEFAULT_GRID_SIZE, tols=DEFAULT_TOLERANCES):
    """
    Exact Pythagorean mate of a rational b (Fejer-Riesz factorization).

    On the circle 1 - |b|^2 = (|den|^2 - |num|^2) / |den|^2. The Laurent
    polynomial |den|^2 - |num|^2 is factored as |q|^2 with q zero-free in
    the open disc, so a = q / den. Extremality is judged on a grid of
    ``size`` points with the thresholds of ``tols``.

    Raises:
        ExtremeInput: when b is extreme
    """
    grid = synthesize(b, size)
    verdict = extremality_test(grid, **tols.extremality())
    if verdict.is_extreme:
        raise ExtremeInput("b is an extreme point; it has no Pythagorean mate", verdict=verdict.to_dict())

    length = max(b.num.size, b.den.size)
    r = _autocorrelation(b.den, length) - _autocorrelation(b.num, length)
    scale = float(np.max(np.abs(r)))
    significant = np.nonzero(np.abs(r) > COEFF_TRIM * scale)[0]
    degree = int(significant[-1]) if significant.size else 0

    if degree == 0:
        q = np.array([np.sqrt(max(r[0].real, 0.0))], dtype=complex)
    else:
        laurent = np.concatenate([np.conj(r[degree:0:-1]), r[: degree + 1]])
        roots = poly_roots(laurent).roots
        modulus = np.abs(roots)
        outside = roots[modulus > 1.0 + CIRCLE_MERGE_TOL]
        on_circle = roots[np.abs(modulus - 1.0) <= CIRCLE_MERGE_TOL]
        chosen = np.concatenate([outside, _merge_circle_roots(on_circle)]) if on_circle.size else outside
        if chosen.size != degree:
            raise NoConvergence(
                "spectral factor root split failed",
                expected=degree,
                found=int(chosen.size),
            )
        monic = P.polyfromroots(chosen)
        z = unit_circle(256)
        # |den|^2 - |num|^2 on the circle = r_0 + 2 Re sum_{j>0} r_j z^j
        positive_part = np.concatenate([[0.0], r[1 : degree + 1]])
        laurent_values = r[0].real + 2.0 * np.real(P.polyval(z, positive_part))
        gain = np.sqrt(np.mean(laurent_values) / np.mean(np.abs(P.polyval(z, monic)) ** 2))
        q = gain * monic
        if abs(q[0]) > 0:
            q = q * (abs(q[0]) / q[0])

    mate = RationalFunction(q, b.den)
    residual = _identity_residual(synthesize(mate, size), grid)
    logger.debug(f"rational mate of degree {degree}: identity residual {residual:.2e}")
    return mate


def _contour_values(f, radius, count):
    if isinstance(f, RationalFunction):
        return f.evaluate(unit_circle(count, radius))
    if f.order <= count:
        scaled = np.zeros(count, dtype=complex)
        scaled[: f.order] = f.coeffs * radius ** np.arange(f.order)
        return count * np.fft.ifft(scaled)
    return P.polyval(unit_circle(count, radius), f.coeffs)


def zero_count_in_disc(f, radius, samples=WINDING_SAMPLES):
    """
    Number of zeros of f in |z| < radius, by the argument principle.

    The phase of f along the circle is unwrapped from its increments; the
    sample count doubles until no increment exceeds pi/2.

    Raises:
        ZeroNearContour: when min |f| on the contour is within 1e-6 of 0 (relative to max |f|)
        InsufficientSamples: when 2^20 samples still do not resolve the phase
    """
    if isinstance(f, TaylorCoeffs) and radius >= 1.0:
        raise ValueError("zero counting for Taylor series needs radius < 1")
    count = int(samples)
    while count <= MAX_WINDING_SAMPLES:
        values = _contour_values(f, radius, count)
        magnitude = np.abs(values)
        if np.min(magnitude) <= CONTOUR_CLEARANCE * max(float(np.max(magnitude)), np.finfo(float).tiny):
            raise ZeroNearContour(
                f"f nearly vanishes on |z| = {radius}",
                radius=radius,
                min_modulus=float(np.min(magnitude)),
            )
        steps = np.angle(np.roll(values, -1) / values)
        if np.max(np.abs(steps)) <= PHASE_STEP_LIMIT:
            return int(np.rint(np.sum(steps) / (2 * np.pi)))
        count *= 2
    raise InsufficientSamples(f"phase not resolved with {MAX_WINDING_SAMPLES} samples", radius=radius)


def disc_zeros(f, margin=DISC_MARGIN):
    """Numerator zeros of a rational f inside the open disc |z| < 1 - margin."""
    require_nonzero(f)
    num = trim_polynomial(f.num, COEFF_TRIM)
    if num.size < 2:
        return np.zeros(0, dtype=complex)
    roots = poly_roots(num).roots
    return roots[np.abs(roots) < 1.0 - margin]


def is_outer_rational(f):
    """
    True iff the rational f has no zeros in the open unit disc.

    Rational functions carry no singular inner factor and boundary zeros
    are log-integrable, so this is exact outerness.

    Raises:
        ZeroFunction: for f identically zero
    """
    return disc_zeros(f).size == 0


def common_inner_divisor_rational(f, g, tol=ZERO_MATCH_TOL):
    """
    Test whether f and g share an inner factor (a common zero in the disc).

    Zeros of f~ are the conjugates of the zeros of f, so the test on a pair
    and on its tilde pair agree.

    Raises:
        ZeroFunction: when either input vanishes identically
    """
    zf = disc_zeros(require_nonzero(f, "f"))
    zg = list(disc_zeros(require_nonzero(g, "g")))
    shared = []
    for z in zf:
        if not zg:
            break
        distances = np.abs(np.asarray(zg) - z)
        k = int(np.argmin(distances))
        if distances[k] < tol:
            shared.append((complex(z), complex(zg.pop(k))))
    return DivisorVerdict(trivial=not shared, shared=shared)
