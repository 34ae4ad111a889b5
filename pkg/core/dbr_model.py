"""
de Branges-Rovnyak model operators as truncated matrices.

The model space K_b is realized inside H^2 + H^2 as the orthocomplement of
B H^2 with B = (T_b; -T_a); the second coordinate is stored in the H^2
picture through W(Delta h) = -a h. Y_b is the backward shift pair restricted
to K_b. The two-sided model (H^2 + L^2) is built separately as TildeModel.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from core.exceptions import GridSizeError, IsometryResidualTooLarge, NotPSD, ZeroB
from core.factorization import pythagorean_mate, rational_mate
from core.hardy import (
    BoundaryGrid,
    RationalFunction,
    TaylorCoeffs,
    analyze,
    check_grid_size,
    eval_disc,
    next_power_of_two,
    synthesize,
    tilde,
    to_taylor,
)
from core.operators import (
    SVD_CUTOFF,
    OperatorMatrix,
    backward_shift,
    char_fn_eval,
    closed_form_samples,
    coincide,
    column_model,
    defect,
    edge_width,
    kernel_dim,
    lower_toeplitz,
    orthocomplement,
)
from core.tolerances import DEFAULT_TOLERANCES
from utils.logging import get_logger

logger = get_logger(__name__)

MIN_TRUNCATION = 32
DEFAULT_GRID_SIZE = 4096
PSD_TOL = 1e-9
GRAM_MAX_RADIUS = 0.9
DILATION_POWERS = 8
NO_ISOMETRY_DELTA = 1e-4


@dataclass(frozen=True, eq=False)
class DbrModel:
    b: TaylorCoeffs
    a: TaylorCoeffs
    N: int
    Tb: OperatorMatrix
    Ta: OperatorMatrix
    B: OperatorMatrix
    K_basis: np.ndarray
    Yb: OperatorMatrix
    b_exact: Optional[RationalFunction] = None
    a_exact: Optional[RationalFunction] = None
    residuals: dict = field(default_factory=dict)
    ledger: dict = field(default_factory=dict)

    @property
    def dim_K(self):
        return self.K_basis.shape[1]


@dataclass(frozen=True, eq=False)
class ModelCharFn:
    computed: object
    closed_form: object
    coincidence: Optional[object] = None


@dataclass(frozen=True, eq=False)
class TildeModel:
    base: DbrModel
    M: int
    basis: np.ndarray
    K_part: np.ndarray
    J_basis: np.ndarray
    Ybold: OperatorMatrix
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class KernelGram:
    points: np.ndarray
    gram: np.ndarray
    min_eigenvalue: float


def toeplitz_analytic(f, N):
    """Analytic Toeplitz matrix of f on H^2_N: entry (i, j) = c_{i-j} for i >= j."""
    return OperatorMatrix(lower_toeplitz(f.coeffs, N), "H2_N", "H2_N")


def _assemble(b_coeffs, a_coeffs, N, cutoff=SVD_CUTOFF):
    Tb = lower_toeplitz(b_coeffs, N)
    Ta = lower_toeplitz(a_coeffs, N)
    B = np.vstack([Tb, -Ta])
    model = column_model([TaylorCoeffs(b_coeffs), TaylorCoeffs(-a_coeffs)], N, label="K_b", cutoff=cutoff)
    K = model.basis
    inner = N - edge_width(N)

    gram = B.conj().T @ B - np.eye(N)
    shift_star = scipy.linalg.block_diag(backward_shift(N), backward_shift(N))
    leak = (np.eye(2 * N) - K @ K.conj().T) @ shift_star @ K @ model.interior_basis
    first = scipy.linalg.svdvals(K[:N, :])
    residuals = {
        "isometry": float(np.linalg.norm(gram[:inner, :inner], 2)),
        "orthonormality": float(np.linalg.norm(K.conj().T @ K - np.eye(K.shape[1]), 2)),
        "orthogonality": float(np.linalg.norm(K.conj().T @ B, 2)),
        "invariance": float(np.linalg.norm(leak, 2)),
        "first_coordinate_rank": int(np.sum(first > 1e-10 * first[0])),
        "first_coordinate_min_sv": float(first[-1]),
        "first_coordinate_condition": float(first[0] / first[-1]) if first[-1] > 0 else float("inf"),
    }
    return Tb, Ta, B, model, residuals


def build_model(b, N, grid_size=DEFAULT_GRID_SIZE, tols=DEFAULT_TOLERANCES):
    """
    Build the truncated model of a nonextreme b.

    Rational b gets its exact Fejer-Riesz mate; Taylor input goes through
    the grid-based factorization and boundary samples are analyzed into a
    Taylor series first. A convergence ledger records every invariant
    residual at N/2 and at N.

    Raises:
        ZeroB: for b identically zero
        NotAnalytic: for boundary samples with negative frequencies
        ExtremeInput: propagated from the mate computation
        IsometryResidualTooLarge: when B*B misses I by more than
            ``tols.isometry_failure`` on the interior block
    """
    check_grid_size(N)
    if N < MIN_TRUNCATION:
        raise GridSizeError(f"truncation must be at least {MIN_TRUNCATION}, got {N}", truncation=N)
    if isinstance(b, BoundaryGrid):
        b = analyze(b, tol=tols.analytic)
    if b.is_zero():
        raise ZeroB("b is identically zero")

    size = max(int(grid_size), next_power_of_two(4 * N))
    if isinstance(b, RationalFunction):
        a_exact = rational_mate(b, size=size, tols=tols)
        b_exact = b
        b_series = to_taylor(b, N, size=size)
        a_series = to_taylor(a_exact, N, size=size)
    else:
        a_exact = b_exact = None
        size = max(size, next_power_of_two(2 * b.order))
        a_series = to_taylor(pythagorean_mate(synthesize(b, size), tols=tols), N)
        b_series = to_taylor(b, N)

    cutoff = tols.svd_cutoff
    Tb, Ta, B, model, residuals = _assemble(b_series.coeffs, a_series.coeffs, N, cutoff)
    _, _, _, _, half = _assemble(b_series.coeffs[: N // 2], a_series.coeffs[: N // 2], N // 2, cutoff)
    ledger = {
        name: {"half": half[name], "full": residuals[name]}
        for name in ("isometry", "orthonormality", "orthogonality", "invariance")
    }
    logger.info(
        f"model N={N}: isometry {residuals['isometry']:.2e}, "
        f"orthogonality {residuals['orthogonality']:.2e}, invariance {residuals['invariance']:.2e}"
    )
    if residuals["isometry"] > tols.isometry_failure:
        logger.error(f"B*B - I residual {residuals['isometry']:.3e} on the interior block")
        raise IsometryResidualTooLarge(
            "B is not an isometry; |a|^2 + |b|^2 = 1 failed",
            residual=residuals["isometry"],
        )

    return DbrModel(
        b=b_series,
        a=a_series,
        N=N,
        Tb=OperatorMatrix(Tb, "H2_N", "H2_N"),
        Ta=OperatorMatrix(Ta, "H2_N", "H2_N"),
        B=OperatorMatrix(B, "H2_N", "H2_N+H2_N"),
        K_basis=model.basis,
        Yb=model.operator,
        b_exact=b_exact,
        a_exact=a_exact,
        residuals=residuals,
        ledger=ledger,
    )


def defect_profile(m, tols=DEFAULT_TOLERANCES):
    """(dim D_Y, dim D_Y*, dim ker Y) on the interior block."""
    return (
        defect(m.Yb, tols.defect_rank, tols.not_contraction).rank,
        defect(m.Yb.adjoint(), tols.defect_rank, tols.not_contraction).rank,
        kernel_dim(m.Yb, tols.kernel),
    )


def closed_form_row(m):
    """The row (a~, b~), exact when the model was built from rational data."""
    if m.a_exact is not None:
        return [tilde(m.a_exact), tilde(m.b_exact)]
    return [tilde(m.a), tilde(m.b)]


def char_fn_of_model(m, points=None, tols=DEFAULT_TOLERANCES):
    """
    Characteristic function of Y_b next to the closed-form row (a~, b~).

    The coincidence test is run at ``tols.coincide`` when both sides have
    the same shape.
    """
    computed = char_fn_eval(m.Yb, points, tol=tols.defect_rank)
    closed = closed_form_samples(closed_form_row(m), computed.points)
    result = None
    if computed.shape == closed.shape:
        result = coincide(computed, closed, tols.coincide)
        logger.debug(f"char fn of model N={m.N}: coincidence residual {result.residual:.3e}")
    else:
        logger.warning(f"characteristic function shape {computed.shape} differs from the closed form {closed.shape}")
    return ModelCharFn(computed, closed, result)


def _delta_fourier(m, size):
    if m.b_exact is not None:
        grid = synthesize(m.b_exact, size)
    else:
        grid = synthesize(m.b, size)
    delta = np.sqrt(np.maximum(1.0 - grid.modulus() ** 2, 0.0))
    return np.fft.fft(delta) / size


def build_tilde_model(m, M, cutoff=SVD_CUTOFF):
    """
    Two-sided model: (H^2_N + L^2_{-M..N-1}) (-) {b h + Delta h}.

    Delta h is realized through the Fourier coefficients of Delta on a grid
    (grid multiplication followed by re-analysis). Ybold is the compression
    of S* + Z* where Z* moves mode m to m-1 and annihilates mode -M.
    """
    N = m.N
    if M < N / 2:
        raise ValueError(f"need M >= N/2 negative modes, got M={M} for N={N}")
    size = next_power_of_two(max(DEFAULT_GRID_SIZE, 4 * (M + N)))
    delta_hat = _delta_fourier(m, size)
    modes = np.arange(-M, N)
    D = delta_hat[(modes[:, None] - np.arange(N)[None, :]) % size]

    embed = np.vstack([m.Tb.entries, D])
    basis = orthocomplement(embed, cutoff)
    shift = scipy.linalg.block_diag(backward_shift(N), backward_shift(M + N))
    ybold = basis.conj().T @ shift @ basis

    U, s, _ = scipy.linalg.svd(D, full_matrices=True)
    rank_D = int(np.sum(s > cutoff * s[0])) if s.size and s[0] > 0 else 0
    range_D = U[:, :rank_D]
    co_range_D = U[:, rank_D:]
    ambient = scipy.linalg.block_diag(np.eye(N), range_D)
    K_part = ambient @ orthocomplement(ambient.conj().T @ embed, cutoff)
    J_basis = np.vstack([np.zeros((N, co_range_D.shape[1]), dtype=complex), co_range_D])

    residuals = _tilde_residuals(N, M, shift, basis, ybold, K_part, J_basis)
    logger.info(
        f"tilde model N={N} M={M}: dilation {residuals['dilation']:.2e}, "
        f"J isometry {residuals['j_isometry']:.2e}"
    )
    return TildeModel(
        base=m,
        M=M,
        basis=basis,
        K_part=K_part,
        J_basis=J_basis,
        Ybold=OperatorMatrix(ybold, "Ktilde_b", "Ktilde_b"),
        residuals=residuals,
    )


def _tilde_residuals(N, M, shift, basis, ybold, K_part, J_basis):
    # Y_b in this picture is the compression of S* + Z* to the K-part
    y_k = K_part.conj().T @ shift @ K_part
    lift = K_part.conj().T @ basis
    dilation = 0.0
    power = np.eye(ybold.shape[0], dtype=complex)
    y_power = np.eye(y_k.shape[0], dtype=complex)
    for _ in range(DILATION_POWERS):
        power = ybold @ power
        y_power = y_k @ y_power
        dilation = max(dilation, float(np.linalg.norm(y_power - lift @ power @ lift.conj().T, 2)))

    # isometry on J, away from the lowest mode
    cutoff_rows = N + np.arange(max(1, -(-M // 8)))
    inner = scipy.linalg.null_space(J_basis[cutoff_rows, :])
    j_inner = J_basis @ inner
    coords = basis.conj().T @ j_inner
    if coords.shape[1]:
        images = np.linalg.norm(ybold @ coords, axis=0)
        j_isometry = float(np.max(np.abs(images - np.linalg.norm(coords, axis=0))))
    else:
        j_isometry = 0.0
    return {
        "dilation": dilation,
        "j_isometry": j_isometry,
        "j_orthogonality": float(np.linalg.norm(J_basis.conj().T @ K_part, 2)) if J_basis.size and K_part.size else 0.0,
        "dim_K_part": int(K_part.shape[1]),
        "dim_J": int(J_basis.shape[1]),
    }


def no_isometric_vector_check(tm, trials=100, seed=0, delta=NO_ISOMETRY_DELTA):
    """
    Random unit vectors of the K-part lose at least ``delta`` of their norm
    under some power Ybold^n, n <= 4N.
    """
    rng = np.random.default_rng(seed)
    coords = tm.basis.conj().T @ tm.K_part
    raw = rng.standard_normal((coords.shape[1], trials)) + 1j * rng.standard_normal((coords.shape[1], trials))
    vectors = coords @ raw
    vectors /= np.linalg.norm(vectors, axis=0)
    best = np.ones(trials)
    Y = tm.Ybold.entries
    for _ in range(4 * tm.base.N):
        vectors = Y @ vectors
        best = np.minimum(best, np.linalg.norm(vectors, axis=0))
        if np.all(best < 1.0 - delta):
            break
    failures = int(np.sum(best >= 1.0 - delta))
    return {"trials": trials, "failures": failures, "worst_norm": float(np.max(best)), "delta": delta}


def kernel_gram(b, points):
    """
    Gram matrix of the H(b) reproducing kernel at the given points.

    Raises:
        NotPSD: when the Gram matrix has an eigenvalue below -1e-9
    """
    w = np.asarray(points, dtype=complex).reshape(-1)
    if w.size and np.max(np.abs(w)) > GRAM_MAX_RADIUS:
        raise ValueError(f"kernel points must satisfy |w| <= {GRAM_MAX_RADIUS}")
    if w.size > 1:
        gaps = np.abs(w[:, None] - w[None, :]) + np.eye(w.size)
        if np.min(gaps) < 1e-12:
            raise ValueError("kernel points must be pairwise distinct")
    bw = np.asarray(eval_disc(b, w), dtype=complex).reshape(-1)
    gram = (1.0 - np.conj(bw)[None, :] * bw[:, None]) / (1.0 - np.conj(w)[None, :] * w[:, None])
    hermitian = 0.5 * (gram + gram.conj().T)
    min_eig = float(scipy.linalg.eigvalsh(hermitian)[0]) if w.size else 0.0
    if min_eig < -PSD_TOL:
        raise NotPSD(f"kernel Gram matrix has eigenvalue {min_eig:.3e}", min_eigenvalue=min_eig)
    return KernelGram(w, gram, min_eig)
