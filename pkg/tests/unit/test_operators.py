"""
Tests for the contraction toolkit.
"""
import numpy as np
import pytest

from core.exceptions import NotAContraction, NotPure, NotStarInner, SampleMismatch, ShapeMismatch
from core.hardy import RationalFunction
from core.operators import (
    CharFnSamples,
    OperatorMatrix,
    backward_shift,
    build_from_inner_column,
    char_fn_eval,
    closed_form_samples,
    coincide,
    default_points,
    defect,
    is_pure_row,
    kernel_dim,
    lower_toeplitz,
    orthocomplement,
    shift_matrix,
    strong_stability_check,
)
from tests.fixtures.sample_data import SQRT_HALF, inner_pair


def _random_unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestOperatorMatrix:
    def test_contraction_flag_checks_norm(self):
        with pytest.raises(NotAContraction):
            OperatorMatrix(2.0 * np.eye(2), contraction=True)

    def test_rejects_vectors(self):
        with pytest.raises(ShapeMismatch):
            OperatorMatrix(np.ones(3))

    def test_adjoint(self):
        T = OperatorMatrix([[1.0, 2j], [0.0, 1.0]], "X", "Y")
        assert np.allclose(T.adjoint().entries, [[1.0, 0.0], [-2j, 1.0]])
        assert T.adjoint().domain_label == "Y"


class TestDefects:
    def test_shift_defects(self):
        S = OperatorMatrix(shift_matrix(6))
        # truncated forward shift: loses e_5, so I - S*S has rank 1
        assert defect(S).rank == 1
        assert defect(S.adjoint()).rank == 1
        assert kernel_dim(S) == 1

    def test_unitary_has_no_defect(self):
        rng = np.random.default_rng(1)
        U = OperatorMatrix(_random_unitary(rng, 4))
        assert defect(U).rank == 0
        assert kernel_dim(U) == 0

    def test_not_a_contraction(self):
        with pytest.raises(NotAContraction):
            defect(OperatorMatrix(1.5 * np.eye(2)))

    def test_orthocomplement(self):
        v = np.array([[1.0], [1.0], [0.0]])
        Q = orthocomplement(v)
        assert Q.shape == (3, 2)
        assert np.allclose(Q.conj().T @ v, 0.0)

    def test_lower_toeplitz(self):
        L = lower_toeplitz([1.0, 2.0], 3)
        assert np.allclose(L, [[1, 0, 0], [2, 1, 0], [0, 2, 1]])
        assert np.allclose(backward_shift(3), shift_matrix(3).T)


class TestStability:
    def test_nilpotent_is_stable(self):
        result = strong_stability_check(OperatorMatrix(backward_shift(8)), 8, 1e-6)
        assert result.stable
        assert result.max_norm == 0.0

    def test_identity_is_not(self):
        result = strong_stability_check(OperatorMatrix(np.eye(3)), 12, 1e-6)
        assert not result.stable
        assert result.witness_index is not None
        assert result.to_dict()["stable"] is False


class TestCharacteristicFunctions:
    def test_default_points(self):
        pts = default_points()
        assert pts.size == 16
        assert np.allclose(sorted(set(np.round(np.abs(pts), 12))), [0.3, 0.7])

    def test_points_outside_range_rejected(self):
        with pytest.raises(ValueError):
            char_fn_eval(OperatorMatrix(0.5 * np.eye(2)), [0.99])

    def test_scalar_contraction(self):
        # T = c on C^1: Theta(lambda) = (lambda - c) / (1 - c lambda)
        c = 0.4
        samples = char_fn_eval(OperatorMatrix([[c]]))
        lam = samples.points
        expected = (lam - c) / (1 - c * lam)
        phase = samples.values[0, 0, 0] / expected[0]
        assert np.allclose(samples.values[:, 0, 0], phase * expected, atol=1e-12)
        assert np.isclose(abs(phase), 1.0)

    def test_shape_checks(self):
        with pytest.raises(ShapeMismatch):
            CharFnSamples([0.1, 0.2], np.zeros((3, 1, 1)))
        with pytest.raises(ShapeMismatch):
            char_fn_eval(OperatorMatrix(np.zeros((2, 3))))


class TestCoincidence:
    def test_recovers_constant_unitaries(self):
        rng = np.random.default_rng(7)
        phi1, phi2 = inner_pair()
        theta = closed_form_samples([phi1, phi2])
        for _ in range(1000):
            tau = np.exp(1j * rng.uniform(0, 2 * np.pi)) * np.eye(1)
            tau_prime = _random_unitary(rng, 2)
            moved = CharFnSamples(theta.points, np.einsum("ab,ibc,cd->iad", tau, theta.values, tau_prime))
            result = coincide(theta, moved)
            assert result.coincide
            assert result.residual < 1e-8

    def test_symmetry_and_reflexivity(self):
        phi1, phi2 = inner_pair()
        theta = closed_form_samples([phi1, phi2])
        other = closed_form_samples([RationalFunction.polynomial([0.5, 0.5]), RationalFunction.polynomial([0.5, -0.5])])
        assert coincide(theta, theta).coincide
        assert coincide(theta, other).coincide
        assert coincide(other, theta).coincide

    def test_different_functions_do_not_coincide(self):
        theta = closed_form_samples([RationalFunction.constant(SQRT_HALF), RationalFunction.polynomial([0.0, SQRT_HALF])])
        other = closed_form_samples([RationalFunction.polynomial([0.0, SQRT_HALF]), RationalFunction.polynomial([0.0, 0.0, SQRT_HALF])])
        assert not coincide(theta, other).coincide

    def test_mismatched_samples(self):
        phi1, phi2 = inner_pair()
        a = closed_form_samples([phi1, phi2])
        b = closed_form_samples([phi1, phi2], points=[0.1, 0.2])
        with pytest.raises(SampleMismatch):
            coincide(a, b)

    def test_purity(self):
        phi1, phi2 = inner_pair()
        assert is_pure_row(closed_form_samples([phi1, phi2]))
        constant = closed_form_samples([RationalFunction.constant(0.0), RationalFunction.constant(1.0)])
        assert not is_pure_row(constant)


class TestInnerColumnModel:
    def test_model_characteristic_function(self):
        phi1, phi2 = inner_pair()
        T = build_from_inner_column(phi1, phi2, 32)
        samples = char_fn_eval(T)
        assert samples.shape == (1, 2)
        result = coincide(samples, closed_form_samples([phi1, phi2]), tol=1e-3)
        assert result.coincide

    def test_rejects_non_inner_pair(self):
        with pytest.raises(NotStarInner):
            build_from_inner_column(RationalFunction.constant(0.5), RationalFunction.polynomial([0.0, 0.5]), 32)

    def test_rejects_constant_row(self):
        with pytest.raises(NotPure):
            build_from_inner_column(RationalFunction.constant(0.0), RationalFunction.constant(1.0), 32)
