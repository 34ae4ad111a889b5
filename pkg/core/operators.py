"""
Finite-dimensional contraction toolkit.

Defect operators, kernel dimension, strong stability, characteristic
functions and their coincidence, and the model contraction attached to an
inner column.

Truncated model operators carry an ``interior`` basis: an orthonormal basis
of the subspace that does not touch the last ceil(N/8) Fourier levels.
Defect ranks and bases are read off the compression to that subspace so the
truncation edge does not show up as extra defect.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from core.exceptions import (
    NotAContraction,
    NotPure,
    NotStarInner,
    SampleMismatch,
    ShapeMismatch,
    SolveFailure,
)
from core.hardy import check_grid_size, eval_disc, synthesize, tilde, to_taylor
from core.tolerances import DEFAULT_TOLERANCES
from utils.logging import get_logger

logger = get_logger(__name__)

# Rank and norm tolerances
DEFECT_TOL = DEFAULT_TOLERANCES.defect_rank
KERNEL_TOL = DEFAULT_TOLERANCES.kernel
CONTRACTION_SLACK = DEFAULT_TOLERANCES.contraction_slack
NEGATIVE_EIGEN_TOL = DEFAULT_TOLERANCES.not_contraction
SVD_CUTOFF = DEFAULT_TOLERANCES.svd_cutoff

# Characteristic functions
MAX_SAMPLE_RADIUS = 0.95
DEFAULT_RADII = (0.3, 0.7)
POINTS_PER_CIRCLE = 8
VALUE_NORM_SLACK = 1e-8

# Coincidence search
COINCIDE_TOL = DEFAULT_TOLERANCES.coincide
PROCRUSTES_MAX_ITER = 200
PROCRUSTES_REL_TOL = 1e-12

STAR_INNER_TOL = DEFAULT_TOLERANCES.star_inner_build
EDGE_FRACTION = 8
STAR_INNER_GRID = 4096


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex matrix between labeled spaces."""

    entries: np.ndarray
    domain_label: str = "H"
    codomain_label: str = "H"
    contraction: bool = False
    interior: Optional[np.ndarray] = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2:
            raise ShapeMismatch(f"operator entries must be a matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("operator entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.interior is not None:
            interior = np.array(self.interior, dtype=complex)
            if interior.ndim != 2 or interior.shape[0] != entries.shape[1]:
                raise ShapeMismatch("interior basis must live in the domain")
            interior.setflags(write=False)
            object.__setattr__(self, "interior", interior)
        if self.contraction:
            self.check_contraction()

    @property
    def dim_in(self):
        return self.entries.shape[1]

    @property
    def dim_out(self):
        return self.entries.shape[0]

    @property
    def is_square(self):
        return self.dim_in == self.dim_out

    def norm(self):
        if self.entries.size == 0:
            return 0.0
        return float(scipy.linalg.svdvals(self.entries)[0])

    def check_contraction(self, slack=CONTRACTION_SLACK):
        """
        Raises:
            NotAContraction: when the largest singular value exceeds 1 + slack
        """
        norm = self.norm()
        if norm > 1.0 + slack:
            raise NotAContraction(f"operator norm {norm:.12f} exceeds 1", norm=norm)
        return self

    def adjoint(self):
        return OperatorMatrix(
            self.entries.conj().T,
            self.codomain_label,
            self.domain_label,
            self.contraction,
            self.interior if self.is_square else None,
        )


@dataclass(frozen=True, eq=False)
class DefectData:
    defect_matrix: OperatorMatrix
    rank: int
    basis: np.ndarray
    tol: float
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))
    full_rank: int = 0


@dataclass(frozen=True, eq=False)
class StabilityResult:
    stable: bool
    n_max: int
    tol: float
    max_norm: float
    witness_index: Optional[int] = None
    witness_vector: Optional[np.ndarray] = None

    def to_dict(self):
        return {
            "stable": self.stable,
            "n_max": self.n_max,
            "tol": self.tol,
            "max_norm": self.max_norm,
            "witness_index": self.witness_index,
        }


@dataclass(frozen=True, eq=False)
class CharFnSamples:
    """Characteristic function values Theta(lambda_i) in fixed defect bases."""

    points: np.ndarray
    values: np.ndarray
    domain_basis: Optional[np.ndarray] = None
    codomain_basis: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.array(self.points, dtype=complex).reshape(-1)
        values = np.array(self.values, dtype=complex)
        if values.ndim != 3 or values.shape[0] != points.size:
            raise ShapeMismatch(f"expected one matrix per sample point, got {values.shape}")
        if points.size and np.max(np.abs(points)) > MAX_SAMPLE_RADIUS + 1e-12:
            raise ValueError(f"sample points must satisfy |lambda| <= {MAX_SAMPLE_RADIUS}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape[1:]

    def max_value_norm(self):
        if self.values.size == 0:
            return 0.0
        return float(max(np.linalg.norm(v, 2) for v in self.values))


@dataclass(frozen=True, eq=False)
class CoincidenceResult:
    coincide: bool
    tau: np.ndarray
    tau_prime: np.ndarray
    residual: float
    iterations: int

    def to_dict(self):
        return {
            "coincide": self.coincide,
            "residual": self.residual,
            "iterations": self.iterations,
            "tau": _complex_matrix_to_list(self.tau),
            "tau_prime": _complex_matrix_to_list(self.tau_prime),
        }


@dataclass(frozen=True, eq=False)
class ColumnModel:
    """
    Truncated model space K = (H^2_N)^k (-) Theta~ H^2_N and the backward
    shift restricted to it.
    """

    operator: OperatorMatrix
    basis: np.ndarray
    multiplier: np.ndarray
    interior_basis: np.ndarray
    N: int


def _complex_matrix_to_list(matrix):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(matrix)]


def edge_width(N):
    return math.ceil(N / EDGE_FRACTION)


def shift_matrix(N):
    """Truncated forward shift S on C^N (ones on the subdiagonal)."""
    return np.eye(N, k=-1, dtype=complex)


def backward_shift(N):
    return np.eye(N, k=1, dtype=complex)


def lower_toeplitz(coeffs, N):
    """N x N lower-triangular Toeplitz matrix with entry (i, j) = c_{i-j}."""
    column = np.zeros(N, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)[:N]
    column[: c.size] = c
    return scipy.linalg.toeplitz(column, np.zeros(N, dtype=complex))


def orthocomplement(matrix, cutoff=SVD_CUTOFF):
    """Orthonormal basis of the orthogonal complement of the range of ``matrix`` (full SVD)."""
    U, s, _ = scipy.linalg.svd(matrix, full_matrices=True)
    if s.size == 0 or s[0] == 0:
        return U
    rank = int(np.sum(s > cutoff * s[0]))
    return U[:, rank:]


def _interior_defect_basis(defect_square, interior, full_basis, tol):
    compressed = interior.conj().T @ defect_square @ interior
    compressed = 0.5 * (compressed + compressed.conj().T)
    mu, W = scipy.linalg.eigh(compressed)
    keep = mu > tol
    n = defect_square.shape[0]
    if not np.any(keep) or full_basis.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    order = np.argsort(mu[keep])[::-1]
    vectors = interior @ W[:, keep][:, order]
    projected = full_basis @ (full_basis.conj().T @ vectors)
    Q, R = scipy.linalg.qr(projected, mode="economic")
    # QR keeps the ordering by interior eigenvalue; drop columns that vanished under projection
    diag = np.abs(np.diag(R))
    return Q[:, diag > tol * max(1.0, float(diag.max(initial=0.0)))]


def defect(T, tol=DEFECT_TOL, negative_tol=NEGATIVE_EIGEN_TOL):
    """
    Defect operator D_T = (I - T*T)^{1/2} with its rank and range basis.

    Negative eigenvalues of I - T*T are clamped at 0. When T carries an
    interior basis the rank and basis come from the compression of I - T*T
    to the interior subspace, projected back onto the range of D_T.

    Raises:
        NotAContraction: when I - T*T has an eigenvalue below -negative_tol
    """
    A = T.entries
    n = A.shape[1]
    square = np.eye(n, dtype=complex) - A.conj().T @ A
    square = 0.5 * (square + square.conj().T)
    lam, V = scipy.linalg.eigh(square)
    if lam.size and lam[0] < -negative_tol:
        raise NotAContraction(f"I - T*T has eigenvalue {lam[0]:.3e}", min_eigenvalue=float(lam[0]))
    lam = np.clip(lam, 0.0, None)
    D = (V * np.sqrt(lam)) @ V.conj().T
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    V = V[:, order]
    full_rank = int(np.sum(lam > tol))
    full_basis = V[:, :full_rank]
    if T.interior is None:
        basis = full_basis
    else:
        basis = _interior_defect_basis(square, T.interior, full_basis, tol)
    logger.debug(f"defect of {T.domain_label}->{T.codomain_label}: full rank {full_rank}, rank {basis.shape[1]}")
    return DefectData(
        defect_matrix=OperatorMatrix(D, T.domain_label, T.domain_label),
        rank=int(basis.shape[1]),
        basis=basis,
        tol=tol,
        eigenvalues=lam,
        full_rank=full_rank,
    )


def kernel_dim(T, tol=KERNEL_TOL):
    """Dimension of ker T (restricted to the interior subspace when T has one)."""
    A = T.entries if T.interior is None else T.entries @ T.interior
    if A.shape[1] == 0:
        return 0
    s = scipy.linalg.svdvals(A)
    return int(A.shape[1] - np.sum(s >= tol))


def strong_stability_check(T, n_max, tol):
    """T^n -> 0 strongly, judged by max_i ||T^{n_max} e_i|| < tol."""
    power = np.linalg.matrix_power(T.entries, int(n_max))
    norms = np.linalg.norm(power, axis=0)
    worst = int(np.argmax(norms)) if norms.size else None
    max_norm = float(norms[worst]) if norms.size else 0.0
    stable = max_norm < tol
    if stable:
        return StabilityResult(True, int(n_max), tol, max_norm)
    witness = np.zeros(T.dim_in, dtype=complex)
    witness[worst] = 1.0
    return StabilityResult(False, int(n_max), tol, max_norm, worst, witness)


def default_points(radii=DEFAULT_RADII, per_circle=POINTS_PER_CIRCLE):
    """Sample points on circles |lambda| = r at equally spaced angles."""
    angles = 2 * np.pi * np.arange(per_circle) / per_circle
    return np.concatenate([r * np.exp(1j * angles) for r in radii])


def char_fn_eval(T, points=None, domain_basis=None, codomain_basis=None, tol=DEFECT_TOL):
    """
    Sample Theta_T(lambda) = -T + lambda D_{T*} (I - lambda T*)^{-1} D_T on D_T.

    Values are matrices from the domain defect basis to the codomain defect
    basis (taken from ``defect`` at rank tolerance ``tol`` unless supplied).

    Raises:
        NotAContraction: propagated from ``defect``
        SolveFailure: when I - lambda T* is numerically singular
    """
    if not T.is_square:
        raise ShapeMismatch("characteristic functions need a square operator")
    pts = default_points() if points is None else np.asarray(points, dtype=complex).reshape(-1)
    if pts.size and np.max(np.abs(pts)) > MAX_SAMPLE_RADIUS + 1e-12:
        raise ValueError(f"sample points must satisfy |lambda| <= {MAX_SAMPLE_RADIUS}")
    d = defect(T, tol)
    d_star = defect(T.adjoint(), tol)
    U = d.basis if domain_basis is None else np.asarray(domain_basis, dtype=complex)
    W = d_star.basis if codomain_basis is None else np.asarray(codomain_basis, dtype=complex)

    A = T.entries
    n = A.shape[0]
    identity = np.eye(n, dtype=complex)
    a_star = A.conj().T
    DU = d.defect_matrix.entries @ U
    D_star = d_star.defect_matrix.entries
    TU = A @ U
    values = []
    for lam in pts:
        try:
            X = scipy.linalg.solve(identity - lam * a_star, DU)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            logger.error(f"resolvent solve failed at lambda={lam}: {e}")
            raise SolveFailure(f"I - lambda T* is singular at lambda = {lam}", point=[lam.real, lam.imag])
        values.append(W.conj().T @ (-TU + lam * (D_star @ X)))
    samples = CharFnSamples(pts, np.array(values).reshape(pts.size, W.shape[1], U.shape[1]), U, W)
    top = samples.max_value_norm()
    if top > 1.0 + VALUE_NORM_SLACK:
        logger.warning(f"characteristic function value of norm {top:.10f} exceeds 1")
    return samples


def closed_form_samples(row, points=None):
    """Samples of an explicit 1 x k row of analytic functions."""
    pts = default_points() if points is None else np.asarray(points, dtype=complex).reshape(-1)
    values = np.array([[[eval_disc(f, lam) for f in row]] for lam in pts], dtype=complex)
    return CharFnSamples(pts, values.reshape(pts.size, 1, len(row)))


def _polar_factor(matrix):
    U, _, Vh = scipy.linalg.svd(matrix)
    return U @ Vh


def _coincidence_residual(values, values_prime, tau, tau_prime):
    diffs = values_prime - np.einsum("ab,ibc,cd->iad", tau, values, tau_prime)
    return float(np.mean(np.linalg.norm(diffs, axis=(1, 2))))


def coincide(theta, theta_prime, tol=COINCIDE_TOL, max_iter=PROCRUSTES_MAX_ITER):
    """
    Test whether Theta' = tau Theta tau' for constant unitaries tau, tau'.

    Alternates two Procrustes problems: with tau fixed, tau' is the polar
    factor of sum_i (tau Theta_i)^* Theta'_i; with tau' fixed, tau is the
    polar factor of sum_i Theta'_i (Theta_i tau')^*. The residual is the mean
    Frobenius mismatch over the sample points.

    Raises:
        SampleMismatch: when the sample points or value shapes differ
    """
    if theta.points.shape != theta_prime.points.shape or not np.allclose(
        theta.points, theta_prime.points, rtol=0, atol=1e-12
    ):
        raise SampleMismatch("characteristic functions were sampled at different points")
    if theta.shape != theta_prime.shape:
        raise SampleMismatch(f"value shapes differ: {theta.shape} vs {theta_prime.shape}")

    values = theta.values
    values_prime = theta_prime.values
    j, k = theta.shape
    tau = np.eye(j, dtype=complex)
    tau_prime = np.eye(k, dtype=complex)
    residual = _coincidence_residual(values, values_prime, tau, tau_prime)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        left = np.einsum("ab,ibc->iac", tau, values)
        tau_prime = _polar_factor(np.einsum("iac,iad->cd", left.conj(), values_prime))
        right = np.einsum("iab,bc->iac", values, tau_prime)
        tau = _polar_factor(np.einsum("iac,ibc->ab", values_prime, right.conj()))
        updated = _coincidence_residual(values, values_prime, tau, tau_prime)
        improvement = residual - updated
        residual = updated
        if improvement <= PROCRUSTES_REL_TOL * max(residual, 1e-300):
            break
    logger.debug(f"coincide: residual {residual:.3e} after {iterations} rounds")
    return CoincidenceResult(residual < tol, tau, tau_prime, residual, iterations)


def is_pure_row(theta, tol=COINCIDE_TOL):
    """False iff the 1 x 2 row coincides with a constant row (0, kappa)."""
    if theta.shape != (1, 2):
        raise ShapeMismatch(f"purity test needs 1 x 2 values, got {theta.shape}")
    constant = np.tile(np.array([[0.0, 1.0]], dtype=complex), (theta.points.size, 1, 1))
    result = coincide(CharFnSamples(theta.points, constant), theta, tol)
    return not result.coincide


def column_model(column, N, label="K", cutoff=SVD_CUTOFF):
    """
    Backward shift restricted to (H^2_N)^k (-) Theta~ H^2_N.

    ``column`` lists the Taylor series of the entries of the inner column
    Theta~. The truncated orthocomplement is exactly invariant under the
    truncated backward shift, so the operator is a restriction, not a
    compression. The interior basis is the same construction at order
    N - ceil(N/8), embedded and expressed in the model basis.
    """
    k = len(column)
    blocks = [lower_toeplitz(f.coeffs, N) for f in column]
    multiplier = np.vstack(blocks)
    basis = orthocomplement(multiplier, cutoff)
    shift_star = scipy.linalg.block_diag(*([backward_shift(N)] * k))
    restricted = basis.conj().T @ shift_star @ basis

    inner_n = N - edge_width(N)
    inner_basis = orthocomplement(np.vstack([b[:inner_n, :inner_n] for b in blocks]), cutoff)
    embedded = np.zeros((k * N, inner_basis.shape[1]), dtype=complex)
    for c in range(k):
        embedded[c * N : c * N + inner_n] = inner_basis[c * inner_n : (c + 1) * inner_n]
    interior, _ = scipy.linalg.qr(basis.conj().T @ embedded, mode="economic")

    operator = OperatorMatrix(restricted, label, label, contraction=True, interior=interior)
    logger.debug(f"column model {label}: N={N}, dim K={basis.shape[1]}, interior dim={interior.shape[1]}")
    return ColumnModel(operator, basis, multiplier, interior, N)


def star_inner_deviation(phi1, phi2, size=STAR_INNER_GRID):
    g1 = synthesize(phi1, size)
    g2 = synthesize(phi2, size)
    return float(np.max(np.abs(g1.modulus() ** 2 + g2.modulus() ** 2 - 1.0)))


def build_from_inner_column(phi1, phi2, N, tol=STAR_INNER_TOL, coincide_tol=COINCIDE_TOL):
    """
    Model contraction T whose characteristic function coincides with (phi1 phi2).

    T is the backward shift pair restricted to (H^2 + H^2) (-) Theta~ H^2
    with Theta~ = (phi1~; phi2~).

    Raises:
        NotStarInner: when |phi1|^2 + |phi2|^2 deviates from 1 by more than tol
        NotPure: when the row coincides with a constant (0, kappa)
    """
    check_grid_size(N)
    deviation = star_inner_deviation(phi1, phi2)
    if deviation > tol:
        raise NotStarInner(f"|phi1|^2 + |phi2|^2 deviates from 1 by {deviation:.3e}", deviation=deviation)
    if not is_pure_row(closed_form_samples([phi1, phi2]), coincide_tol):
        raise NotPure("the row coincides with a constant (0, kappa)")
    column = [to_taylor(tilde(phi1), N), to_taylor(tilde(phi2), N)]
    return column_model(column, N, label="K_theta").operator
