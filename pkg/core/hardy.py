"""
Truncated Hardy-space substrate.

Analytic functions on the disc are carried either exactly, as a
RationalFunction, or as a truncated power series (TaylorCoeffs). A
BoundaryGrid holds samples on the unit circle at t_k = 2*pi*k/size.
Conversions always flow rational -> grid -> Taylor.
"""

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from core.exceptions import DegreeTooLow, GridSizeError, NotAnalytic, PoleNearCircle, ZeroFunction
from core.tolerances import DEFAULT_TOLERANCES
from utils.logging import get_logger

logger = get_logger(__name__)

# Grid settings
MIN_GRID_SIZE = 8
ANALYTIC_TOL = DEFAULT_TOLERANCES.analytic  # relative negative-frequency energy
DENOMINATOR_CLEARANCE = 1e-9
TRUNCATION_WARN_RADIUS = 0.9

# Leading coefficients below this fraction of the largest are dropped
COEFF_TRIM = 1e-14


def is_power_of_two(n):
    """Return True when n is a positive integral power of two."""
    try:
        n = int(n)
    except (TypeError, ValueError):
        return False
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n):
    return 1 << max(0, int(n) - 1).bit_length()


def check_grid_size(size):
    if not is_power_of_two(size) or int(size) < MIN_GRID_SIZE:
        raise GridSizeError(f"grid size must be a power of two >= {MIN_GRID_SIZE}, got {size}", size=size)
    return int(size)


def unit_circle(size, radius=1.0):
    """Points radius*exp(2*pi*i*k/size), k = 0..size-1."""
    return radius * np.exp(2j * np.pi * np.arange(size) / size)


def _complex_vector(values, name):
    arr = np.array(values, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


def trim_polynomial(coeffs, rel_tol=0.0):
    """Drop leading (highest-degree) coefficients that are zero, or tiny relative to the rest."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > rel_tol * scale)[0]
    return c[: keep[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Samples of a function on the unit circle."""

    samples: np.ndarray

    def __post_init__(self):
        samples = _complex_vector(self.samples, "samples")
        check_grid_size(samples.size)
        object.__setattr__(self, "samples", samples)

    @property
    def size(self):
        return self.samples.size

    @property
    def points(self):
        return unit_circle(self.size)

    def modulus(self):
        return np.abs(self.samples)


@dataclass(frozen=True, eq=False)
class TaylorCoeffs:
    """
    Truncated Taylor series c_0 + c_1 z + ... + c_{N-1} z^{N-1}.

    ``residuals`` carries diagnostics from whatever produced the series
    (negative-frequency energy, factorization residuals, discarded tail).
    """

    coeffs: np.ndarray
    neg_energy_ratio: float = 0.0
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        coeffs = _complex_vector(self.coeffs, "coeffs")
        if coeffs.size < 1:
            raise ValueError("TaylorCoeffs needs order >= 1")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self):
        return self.coeffs.size

    def tail_energy(self, start=None):
        """Energy sum_{k >= start} |c_k|^2; defaults to the last quarter of the series."""
        if start is None:
            start = (3 * self.order) // 4
        return float(np.sum(np.abs(self.coeffs[start:]) ** 2))

    def padded(self, order):
        """Coefficients truncated or zero-padded to ``order`` entries."""
        out = np.zeros(order, dtype=complex)
        k = min(order, self.order)
        out[:k] = self.coeffs[:k]
        return out

    def tilde(self):
        return TaylorCoeffs(np.conj(self.coeffs), self.neg_energy_ratio, dict(self.residuals))

    def is_zero(self):
        return not np.any(self.coeffs)

    def with_residuals(self, **extra):
        merged = dict(self.residuals)
        merged.update(extra)
        return replace(self, residuals=merged)


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """
    num(z) / den(z) with coefficients in ascending powers.

    The denominator is scaled so den(0) = 1; it must have no zeros in the
    closed unit disc.
    """

    num: np.ndarray
    den: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))

    def __post_init__(self):
        num = trim_polynomial(_complex_vector(self.num, "num"))
        den = trim_polynomial(_complex_vector(self.den, "den"))
        if den[0] == 0:
            raise PoleNearCircle("denominator vanishes at the origin", den=den.tolist())
        num = num / den[0]
        den = den / den[0]
        if den.size > 1:
            poles = poly_roots(den).roots
            inside = poles[np.abs(poles) <= 1.0]
            if inside.size:
                raise PoleNearCircle(
                    "denominator has zeros in the closed unit disc",
                    poles=[complex(p) for p in inside],
                )
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def polynomial(cls, coeffs):
        return cls(np.asarray(coeffs, dtype=complex))

    @classmethod
    def constant(cls, value):
        return cls(np.array([value], dtype=complex))

    @property
    def degree(self):
        return max(self.num.size, self.den.size) - 1

    def is_zero(self):
        return not np.any(self.num)

    def is_polynomial(self):
        return self.den.size == 1

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        return P.polyval(z, self.num) / P.polyval(z, self.den)

    def tilde(self):
        return RationalFunction(np.conj(self.num), np.conj(self.den))

    def scaled(self, factor):
        return RationalFunction(self.num * factor, self.den)

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(P.polymul(self.num, other.num), P.polymul(self.den, other.den))
        return self.scaled(complex(other))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class RootReport:
    roots: np.ndarray
    residuals: np.ndarray

    @property
    def max_residual(self):
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def poly_roots(p, polish=True):
    """
    Roots of a polynomial (ascending coefficients) via companion-matrix eigenvalues.

    One Newton step is applied to each root and kept only when it lowers
    the residual |p(root)|.

    Raises:
        DegreeTooLow: for constant polynomials
    """
    c = trim_polynomial(p)
    if c.size < 2:
        raise DegreeTooLow("poly_roots needs degree >= 1", coeffs=np.asarray(p).tolist())
    roots = scipy.linalg.eigvals(P.polycompanion(c)) if c.size > 2 else np.array([-c[0] / c[1]])
    roots = np.asarray(roots, dtype=complex)
    residuals = np.abs(P.polyval(roots, c))
    if polish:
        deriv = P.polyder(c)
        slope = P.polyval(roots, deriv)
        ok = np.abs(slope) > 0
        stepped = roots.copy()
        stepped[ok] = roots[ok] - P.polyval(roots[ok], c) / slope[ok]
        new_residuals = np.abs(P.polyval(stepped, c))
        better = new_residuals < residuals
        roots = np.where(better, stepped, roots)
        residuals = np.where(better, new_residuals, residuals)
    return RootReport(roots, residuals)


def companion_roots_batch(coeff_rows):
    """
    Roots of many polynomials of one common degree at once.

    ``coeff_rows`` is (K, d+1) in ascending powers with nonzero leading
    coefficients; returns a (K, d) array.
    """
    rows = np.asarray(coeff_rows, dtype=complex)
    count, width = rows.shape
    degree = width - 1
    if degree < 1:
        return np.zeros((count, 0), dtype=complex)
    if degree == 1:
        return (-rows[:, 0] / rows[:, 1])[:, None]
    companions = np.zeros((count, degree, degree), dtype=complex)
    idx = np.arange(degree - 1)
    companions[:, idx + 1, idx] = 1.0
    companions[:, :, -1] = -rows[:, :-1] / rows[:, -1:]
    return np.linalg.eigvals(companions)


def synthesize(f, size):
    """
    Sample f on the unit circle.

    Exact for rational functions; for Taylor series the grid must hold at
    least twice the series order.
    """
    size = check_grid_size(size)
    if isinstance(f, RationalFunction):
        z = unit_circle(size)
        den = P.polyval(z, f.den)
        clearance = float(np.min(np.abs(den)))
        if clearance < DENOMINATOR_CLEARANCE:
            raise PoleNearCircle("denominator vanishes near the unit circle", clearance=clearance)
        return BoundaryGrid(P.polyval(z, f.num) / den)
    if size < 2 * f.order:
        raise GridSizeError(f"grid of size {size} is too small for order {f.order}", size=size, order=f.order)
    padded = np.zeros(size, dtype=complex)
    padded[: f.order] = f.coeffs
    return BoundaryGrid(size * np.fft.ifft(padded))


def analyze(g, tol=ANALYTIC_TOL):
    """
    Fourier-analyze boundary samples into Taylor coefficients.

    The nonnegative frequencies 0..size/2-1 are returned; the rest of the
    spectrum (the Nyquist bin included) counts as negative-frequency energy.
    Pass ``tol=None`` to skip the analyticity check.

    Raises:
        NotAnalytic: when the negative-frequency energy ratio exceeds tol
    """
    n = g.size
    spectrum = np.fft.fft(g.samples) / n
    half = n // 2
    total = float(np.sum(np.abs(spectrum) ** 2))
    negative = float(np.sum(np.abs(spectrum[half:]) ** 2))
    ratio = negative / total if total > 0 else 0.0
    if tol is not None and ratio > tol:
        raise NotAnalytic(f"negative-frequency energy ratio {ratio:.3e} exceeds {tol:.1e}", ratio=ratio)
    return TaylorCoeffs(spectrum[:half], neg_energy_ratio=ratio)


def eval_disc(f, z):
    """Horner evaluation inside the disc; scalar in, scalar out."""
    z_arr = np.asarray(z, dtype=complex)
    if isinstance(f, TaylorCoeffs):
        radius = float(np.max(np.abs(z_arr))) if z_arr.size else 0.0
        if radius >= 1.0:
            raise ValueError(f"Taylor series evaluated at |z| = {radius:.3f} >= 1")
        if radius > TRUNCATION_WARN_RADIUS:
            logger.warning(f"Taylor evaluation at |z| = {radius:.3f}: truncation error grows near the circle")
        values = P.polyval(z_arr, f.coeffs)
    else:
        values = f.evaluate(z_arr)
    if np.ndim(z) == 0:
        return complex(values)
    return values


def to_taylor(f, order, size=None):
    """Taylor coefficients of f up to ``order`` terms, going through a boundary grid."""
    if isinstance(f, TaylorCoeffs):
        return TaylorCoeffs(f.padded(order), f.neg_energy_ratio, dict(f.residuals))
    if size is None:
        size = max(256, next_power_of_two(4 * order))
    series = analyze(synthesize(f, size), tol=None)
    return TaylorCoeffs(
        series.padded(order),
        series.neg_energy_ratio,
        {"discarded_tail": series.tail_energy(order) if order < series.order else 0.0},
    )


def tilde(f):
    """f~(z) = conj(f(conj z))."""
    return f.tilde()


def combine(weights, functions):
    """
    Linear combination sum_i w_i f_i.

    Rational inputs are combined exactly over a common denominator; Taylor
    inputs are added coefficientwise.
    """
    weights = [complex(w) for w in weights]
    functions = list(functions)
    if len(weights) != len(functions) or not functions:
        raise ValueError("combine needs one weight per function")
    if all(isinstance(f, TaylorCoeffs) for f in functions):
        order = max(f.order for f in functions)
        return TaylorCoeffs(sum(w * f.padded(order) for w, f in zip(weights, functions)))
    if not all(isinstance(f, RationalFunction) for f in functions):
        raise TypeError("combine cannot mix rational and Taylor inputs")
    first_den = functions[0].den
    if all(f.den.size == first_den.size and np.allclose(f.den, first_den, rtol=0, atol=1e-15) for f in functions):
        num = np.zeros(max(f.num.size for f in functions), dtype=complex)
        for w, f in zip(weights, functions):
            num[: f.num.size] += w * f.num
        return RationalFunction(num, first_den)
    den = np.ones(1, dtype=complex)
    for f in functions:
        den = P.polymul(den, f.den)
    num = np.zeros(1, dtype=complex)
    for i, (w, f) in enumerate(zip(weights, functions)):
        term = w * f.num
        for j, g in enumerate(functions):
            if j != i:
                term = P.polymul(term, g.den)
        num = P.polyadd(num, term)
    return RationalFunction(num, den)


def require_nonzero(f, name="function"):
    if f.is_zero():
        raise ZeroFunction(f"{name} is identically zero")
    return f
