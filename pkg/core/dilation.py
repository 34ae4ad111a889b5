"""
Rank-one dilations T_xi of a contraction with defect dimensions (2, 1).

The 2 x 2 building block is A = [[alpha, 0], [a conj(xi1), a conj(xi2)]];
a_xi is the only a for which A is a contraction with one-dimensional
defects, and e_xi spans ker(I - A*A).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from core.exceptions import (
    AlphaOutOfRange,
    C1Violated,
    DefectProfileUnexpected,
    KernelDimNotOne,
    NoConvergence,
)
from core.factorization import extremality_test
from core.hardy import BoundaryGrid, unit_circle
from core.operators import (
    OperatorMatrix,
    char_fn_eval,
    default_points,
    defect,
    edge_width,
    kernel_dim,
)
from core.tolerances import DEFAULT_TOLERANCES
from utils.logging import get_logger

logger = get_logger(__name__)

UNIT_TOL = 1e-12
KERNEL_TOL = DEFAULT_TOLERANCES.kernel
RANK_TOL = DEFAULT_TOLERANCES.defect_rank
TARGET_RESIDUAL = 1e-9
SEARCH_GRID = 64
SCAN_STEP = 1e-3

# boundary estimate for b_xi
INNER_RADIUS = 0.9
OUTER_RADIUS = 0.95
BOUNDARY_SAMPLES = 256
DILATION_POWERS = 8


@dataclass(frozen=True, eq=False)
class XiDilation:
    T: OperatorMatrix
    xi: np.ndarray
    alpha: float
    a_xi: float
    e_xi: np.ndarray
    m: int
    T_xi: OperatorMatrix
    xi_ambient: np.ndarray
    residuals: dict = field(default_factory=dict)
    base_profile: tuple = ()
    defect_ranks: tuple = ()

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "xi": [[complex(z).real, complex(z).imag] for z in self.xi],
            "a_xi": self.a_xi,
            "e_xi": [[complex(z).real, complex(z).imag] for z in self.e_xi],
            "m": self.m,
            "base_profile": [int(r) for r in self.base_profile],
            "defect_ranks": [int(r) for r in self.defect_ranks],
            "residuals": dict(self.residuals),
        }


def _unit_vector(xi, name="xi"):
    v = np.asarray(xi, dtype=complex).reshape(-1)
    if v.size != 2:
        raise ValueError(f"{name} must be a 2-vector")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector, got norm {norm:.15f}")
    return v


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}", alpha=alpha)


def _fix_phase(v):
    """Rotate v so its first nonzero coordinate is positive real."""
    for z in v:
        if abs(z) > UNIT_TOL:
            return v * (abs(z) / z)
    return v


def block_matrix(alpha, a, xi):
    return np.array(
        [[alpha, 0.0], [a * np.conj(xi[0]), a * np.conj(xi[1])]],
        dtype=complex,
    )


def a_xi(alpha, xi):
    """
    Closed-form a_xi = ((1 - alpha^2) / (1 - alpha^2 |xi2|^2))^(1/2) and the matrix A.

    Raises:
        AlphaOutOfRange: unless 0 < alpha < 1
    """
    _check_alpha(alpha)
    v = _unit_vector(xi)
    value = float(np.sqrt((1.0 - alpha ** 2) / (1.0 - alpha ** 2 * abs(v[1]) ** 2)))
    return value, block_matrix(alpha, value, v)


def e_xi(A, tol=KERNEL_TOL):
    """
    Unit vector spanning ker(I - A*A), first nonzero coordinate positive.

    Raises:
        KernelDimNotOne: when the kernel is not one-dimensional at ``tol``
    """
    A = np.asarray(A, dtype=complex)
    gap = np.eye(2) - A.conj().T @ A
    lam, V = scipy.linalg.eigh(0.5 * (gap + gap.conj().T))
    kernel = np.abs(lam) < tol
    if int(np.sum(kernel)) != 1:
        raise KernelDimNotOne(
            f"ker(I - A*A) has dimension {int(np.sum(kernel))}",
            eigenvalues=[float(x) for x in lam],
        )
    v = V[:, int(np.argmin(np.abs(lam)))]
    return _fix_phase(v / np.linalg.norm(v))


def scan_a(alpha, xi, step=SCAN_STEP, tol=RANK_TOL):
    """
    Defect rank of A and its norm for a on the grid {0, step, ..., 1} plus a_xi.

    Returns a dict with the grid, the ranks of I - A*A (eigenvalues above
    ``tol`` in modulus), the largest singular values of A and the index of
    the a_xi cell.
    """
    value, _ = a_xi(alpha, xi)
    v = _unit_vector(xi)
    grid = np.union1d(np.arange(0.0, 1.0 + 0.5 * step, step), [value])
    mats = np.zeros((grid.size, 2, 2), dtype=complex)
    mats[:, 0, 0] = alpha
    mats[:, 1, 0] = grid * np.conj(v[0])
    mats[:, 1, 1] = grid * np.conj(v[1])
    gram = np.conj(np.transpose(mats, (0, 2, 1))) @ mats
    gaps = np.eye(2)[None, :, :] - gram
    eigs = np.linalg.eigvalsh(gaps)
    ranks = np.sum(np.abs(eigs) > tol, axis=1)
    norms = np.sqrt(np.clip(1.0 - eigs[:, 0], 0.0, None))
    cell = int(np.searchsorted(grid, value))
    return {"a": grid, "rank": ranks, "max_singular_value": norms, "a_xi_index": cell}


def _target_residual(alpha, xi, eta):
    _, A = a_xi(alpha, xi)
    e = e_xi(A)
    phase = np.vdot(eta, e)
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    return float(np.linalg.norm(e - eta * phase))


def _xi_from_angles(theta, psi):
    return np.array([np.cos(theta), np.sin(theta) * np.exp(1j * psi)], dtype=complex)


def xi_for_target_e(alpha, eta, grid=SEARCH_GRID, tol=TARGET_RESIDUAL):
    """
    Find xi with e_xi = eta up to a unimodular constant.

    The kernel vector of I - A*A is proportional to
    (xi1 / (1 - alpha^2), xi2), so xi is proportional to
    ((1 - alpha^2) eta1, eta2). A grid search over (theta, psi) followed by
    Nelder-Mead is used only when the closed form misses ``tol``.

    Raises:
        AlphaOutOfRange: unless 0 < alpha < 1
        NoConvergence: when the search cannot reach ``tol``
    """
    _check_alpha(alpha)
    target = _fix_phase(_unit_vector(eta, "eta"))
    guess = np.array([(1.0 - alpha ** 2) * target[0], target[1]], dtype=complex)
    xi = _fix_phase(guess / np.linalg.norm(guess))
    residual = _target_residual(alpha, xi, target)
    if residual <= tol:
        return xi, residual

    logger.warning(f"closed-form xi missed the target by {residual:.3e}; searching")
    thetas = np.linspace(0.0, np.pi / 2, grid)
    psis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    best = (np.inf, 0.0, 0.0)
    for theta in thetas:
        for psi in psis:
            try:
                r = _target_residual(alpha, _xi_from_angles(theta, psi), target)
            except KernelDimNotOne:
                continue
            if r < best[0]:
                best = (r, theta, psi)

    def objective(p):
        try:
            return _target_residual(alpha, _xi_from_angles(p[0], p[1]), target)
        except KernelDimNotOne:
            return np.inf

    found = scipy.optimize.minimize(
        objective,
        x0=[best[1], best[2]],
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 4000},
    )
    residual = float(found.fun)
    if residual > tol:
        raise NoConvergence(f"no xi reaches the target e, best residual {residual:.3e}", residual=residual)
    return _fix_phase(_xi_from_angles(*found.x)), residual


def _defect_bases(d, d_star, T):
    """Defect bases rotated so the compression T_d is (alpha, 0)."""
    U, W = d.basis, d_star.basis
    T_d = W.conj().T @ T.entries @ U
    left, s, right_h = scipy.linalg.svd(T_d)
    U = U @ right_h.conj().T
    W = W * left[0, 0]
    return U, W, float(s[0])


def build_T_xi(T, xi, m=None, tols=DEFAULT_TOLERANCES):
    """
    Assemble T_xi on H + C^m.

    The first block row is T; the next row sends x to a_xi <x, xi> in the
    first chain coordinate; the chain shifts its coordinates down and drops
    the last one. Ranks use ``tols.defect_rank`` and ``tols.kernel``; the
    base operator must be a contraction within ``tols.contraction_slack``.

    Raises:
        NotAContraction: when T is not a contraction
        C1Violated: unless T has defect dimensions (2, 1) and a one-dimensional kernel
        DefectProfileUnexpected: when T_xi does not have defect dimensions (1, 1)
    """
    T.check_contraction(tols.contraction_slack)
    d = defect(T, tols.defect_rank, tols.not_contraction)
    d_star = defect(T.adjoint(), tols.defect_rank, tols.not_contraction)
    profile = (d.rank, d_star.rank, kernel_dim(T, tols.kernel))
    if profile != (2, 1, 1):
        raise C1Violated(f"base operator has defect profile {profile}", profile=list(profile))
    v = _unit_vector(xi)
    n = T.dim_in
    m = 2 * n if m is None else int(m)
    if m < 4:
        raise ValueError(f"chain length must be at least 4, got {m}")

    U, W, alpha = _defect_bases(d, d_star, T)
    a_value, A = a_xi(alpha, v)
    e = e_xi(A, tols.kernel)
    xi_ambient = U @ v

    big = np.zeros((n + m, n + m), dtype=complex)
    big[:n, :n] = T.entries
    big[n, :n] = a_value * xi_ambient.conj()
    big[n:, n:] = np.eye(m, k=-1)

    chain_inner = m - edge_width(m)
    base_interior = np.eye(n, dtype=complex) if T.interior is None else T.interior
    interior = np.zeros((n + m, base_interior.shape[1] + chain_inner), dtype=complex)
    interior[:n, : base_interior.shape[1]] = base_interior
    interior[n : n + chain_inner, base_interior.shape[1] :] = np.eye(chain_inner)
    T_xi = OperatorMatrix(big, "H+C^m", "H+C^m", contraction=True, interior=interior)

    ranks = (
        defect(T_xi, tols.defect_rank, tols.not_contraction).rank,
        defect(T_xi.adjoint(), tols.defect_rank, tols.not_contraction).rank,
    )
    if ranks != (1, 1):
        logger.error(f"T_xi defect ranks {ranks} for alpha={alpha:.6f}")
        raise DefectProfileUnexpected(f"T_xi has defect ranks {ranks}", ranks=list(ranks))

    residuals = _dilation_residuals(T.entries, big, n, m)
    residuals["isometry_on_A_e"] = float(abs(np.linalg.norm(A @ e) - 1.0))
    logger.info(f"T_xi built: alpha={alpha:.6f}, a_xi={a_value:.6f}, dilation residual {residuals['dilation']:.2e}")
    return XiDilation(
        T=T,
        xi=v,
        alpha=alpha,
        a_xi=a_value,
        e_xi=e,
        m=m,
        T_xi=T_xi,
        xi_ambient=xi_ambient,
        residuals=residuals,
        base_profile=profile,
        defect_ranks=ranks,
    )


def _dilation_residuals(base, big, n, m):
    dilation = 0.0
    power = np.eye(n + m, dtype=complex)
    base_power = np.eye(n, dtype=complex)
    for _ in range(min(DILATION_POWERS, m)):
        power = big @ power
        base_power = base @ base_power
        dilation = max(dilation, float(np.max(np.abs(power[:n, :n] - base_power))))
    chain = big[:, n : n + m - 1]
    gram = chain.conj().T @ chain
    return {
        "dilation": dilation,
        "chain_isometry": float(np.max(np.abs(gram - np.eye(m - 1)))),
        "norm": float(scipy.linalg.svdvals(big)[0]),
    }


def char_fn_b_xi(d, points=None, tols=DEFAULT_TOLERANCES):
    """
    Scalar characteristic function b_xi of T_xi and its extremality verdict.

    The boundary modulus is estimated from |b_xi| on the circles of radius
    0.95 and 0.9 by one linear extrapolation step to r = 1.
    """
    pts = default_points() if points is None else np.asarray(points, dtype=complex).reshape(-1)
    outer = unit_circle(BOUNDARY_SAMPLES, OUTER_RADIUS)
    inner = unit_circle(BOUNDARY_SAMPLES, INNER_RADIUS)
    everything = char_fn_eval(d.T_xi, np.concatenate([pts, outer, inner]), tol=tols.defect_rank)
    if everything.shape != (1, 1):
        raise DefectProfileUnexpected(f"b_xi has shape {everything.shape}", shape=list(everything.shape))

    values = everything.values
    count = pts.size
    samples = type(everything)(pts, values[:count], everything.domain_basis, everything.codomain_basis)
    m_outer = np.abs(values[count : count + BOUNDARY_SAMPLES, 0, 0])
    m_inner = np.abs(values[count + BOUNDARY_SAMPLES :, 0, 0])
    extrapolated = 2.0 * m_outer - m_inner
    step = float(np.max(np.abs(extrapolated - m_outer)))
    if step > 0.1:
        logger.warning(f"b_xi boundary extrapolation moved the modulus by {step:.3f}")
    boundary = np.clip(extrapolated, 0.0, 1.0)
    verdict = extremality_test(BoundaryGrid(boundary.astype(complex)), **tols.extremality())
    logger.debug(f"b_xi: {verdict.verdict.value}, log integral {verdict.log_integral:.4f}")
    return samples, verdict


def value_at_zero(d, tol=RANK_TOL):
    """-W* T_xi U in the defect bases of T_xi, the value b_xi(0)."""
    U = defect(d.T_xi, tol).basis
    W = defect(d.T_xi.adjoint(), tol).basis
    return complex(-(W.conj().T @ d.T_xi.entries @ U)[0, 0])
