"""
Tests for the truncated Hardy-space substrate.
"""
import numpy as np
import pytest

from core.exceptions import DegreeTooLow, GridSizeError, NotAnalytic, PoleNearCircle
from core.hardy import (
    BoundaryGrid,
    RationalFunction,
    TaylorCoeffs,
    analyze,
    combine,
    companion_roots_batch,
    eval_disc,
    is_power_of_two,
    next_power_of_two,
    poly_roots,
    synthesize,
    tilde,
    to_taylor,
    trim_polynomial,
    unit_circle,
)


class TestGridHelpers:
    def test_power_of_two(self):
        assert is_power_of_two(1)
        assert is_power_of_two(4096)
        assert not is_power_of_two(0)
        assert not is_power_of_two(12)
        assert not is_power_of_two("x")

    def test_next_power_of_two(self):
        assert next_power_of_two(1) == 1
        assert next_power_of_two(5) == 8
        assert next_power_of_two(64) == 64

    def test_boundary_grid_rejects_bad_sizes(self):
        with pytest.raises(GridSizeError):
            BoundaryGrid(np.ones(12))
        with pytest.raises(GridSizeError):
            BoundaryGrid(np.ones(4))

    def test_unit_circle_points(self):
        z = unit_circle(8, radius=0.5)
        assert np.allclose(np.abs(z), 0.5)
        assert np.isclose(z[0], 0.5)

    def test_trim_polynomial(self):
        assert np.array_equal(trim_polynomial([1.0, 2.0, 0.0, 0.0]), np.array([1.0, 2.0]))
        assert np.array_equal(trim_polynomial([0.0, 0.0]), np.zeros(1))


class TestRationalFunction:
    def test_normalizes_den_at_zero(self):
        f = RationalFunction([2.0, 4.0], [2.0, 1.0])
        assert f.den[0] == 1.0
        assert np.allclose(f.num, [1.0, 2.0])
        assert np.isclose(f.evaluate(0.3), (2 + 4 * 0.3) / (2 + 0.3))

    def test_pole_in_closed_disc_rejected(self):
        with pytest.raises(PoleNearCircle):
            RationalFunction([1.0], [1.0, -1.0])
        with pytest.raises(PoleNearCircle):
            RationalFunction([1.0], [1.0, -2.0])

    def test_tilde_conjugates_coefficients(self):
        f = RationalFunction([1j, 2.0], [1.0, 0.5j])
        z = 0.3 + 0.2j
        assert np.isclose(tilde(f).evaluate(z), np.conj(f.evaluate(np.conj(z))))

    def test_multiplication(self):
        f = RationalFunction.polynomial([1.0, 1.0])
        g = RationalFunction([1.0], [1.0, -0.5])
        z = 0.4
        assert np.isclose((f * g).evaluate(z), f.evaluate(z) * g.evaluate(z))
        assert np.isclose((2.0 * f).evaluate(z), 2.0 * f.evaluate(z))

    def test_zero_and_degree(self):
        assert RationalFunction.constant(0.0).is_zero()
        assert RationalFunction([0.0, 1.0], [1.0, 0.5]).degree == 1
        assert RationalFunction.polynomial([1.0, 2.0]).is_polynomial()


class TestRoots:
    def test_poly_roots(self):
        report = poly_roots([2.0, -3.0, 1.0])  # (z - 1)(z - 2)
        assert np.allclose(np.sort(report.roots.real), [1.0, 2.0])
        assert report.max_residual < 1e-12

    def test_constant_has_no_roots(self):
        with pytest.raises(DegreeTooLow):
            poly_roots([3.0])

    def test_companion_batch_matches_single(self):
        rows = np.array([[2.0, -3.0, 1.0], [-1.0, 0.0, 1.0]], dtype=complex)
        roots = companion_roots_batch(rows)
        assert roots.shape == (2, 2)
        assert np.allclose(np.sort(roots[0].real), [1.0, 2.0])
        assert np.allclose(np.sort(roots[1].real), [-1.0, 1.0])


class TestSynthesizeAnalyze:
    def test_rational_round_trip(self):
        f = RationalFunction([1.0, 0.5], [1.0, -0.3])
        series = analyze(synthesize(f, 256))
        expected = np.array([1.0, 0.8, 0.24])  # (1 + 0.5z) * sum (0.3z)^k
        assert np.allclose(series.coeffs[:3], expected, atol=1e-12)
        assert series.neg_energy_ratio < 1e-20

    def test_taylor_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            c = rng.standard_normal(16) + 1j * rng.standard_normal(16)
            series = analyze(synthesize(TaylorCoeffs(c), 64))
            assert np.allclose(series.coeffs[:16], c, atol=1e-12)
            assert series.neg_energy_ratio < 1e-20

    def test_synthesize_is_linear(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            f, g = (TaylorCoeffs(rng.standard_normal(8) + 1j * rng.standard_normal(8)) for _ in range(2))
            s, t = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            combined = synthesize(TaylorCoeffs(s * f.coeffs + t * g.coeffs), 32).samples
            assert np.allclose(combined, s * synthesize(f, 32).samples + t * synthesize(g, 32).samples, atol=1e-12)

    def test_rational_synthesis_is_linear(self):
        f = RationalFunction([1.0, 0.5], [1.0, -0.3])
        g = RationalFunction([0.2j, -0.1], [1.0, 0.6])
        combined = synthesize(combine([2.0, -1j], [f, g]), 128).samples
        assert np.allclose(combined, 2.0 * synthesize(f, 128).samples - 1j * synthesize(g, 128).samples, atol=1e-12)

    def test_taylor_grid_too_small(self):
        with pytest.raises(GridSizeError):
            synthesize(TaylorCoeffs(np.ones(16)), 16)

    def test_not_analytic(self):
        z = unit_circle(64)
        with pytest.raises(NotAnalytic):
            analyze(BoundaryGrid(np.conj(z)))
        assert analyze(BoundaryGrid(np.conj(z)), tol=None).neg_energy_ratio > 0.9

    def test_pole_near_circle_on_synthesis(self):
        f = RationalFunction([1.0], [1.0, -1.0 / (1.0 + 1e-11)])
        with pytest.raises(PoleNearCircle):
            synthesize(f, 64)


class TestEvaluation:
    def test_eval_disc_taylor(self):
        f = TaylorCoeffs([1.0, 2.0, 3.0])
        assert np.isclose(eval_disc(f, 0.5), 1 + 1 + 0.75)
        with pytest.raises(ValueError):
            eval_disc(f, 1.0)

    def test_to_taylor_of_rational(self):
        f = RationalFunction([1.0], [1.0, -0.5])
        series = to_taylor(f, 8)
        assert series.order == 8
        assert np.allclose(series.coeffs, 0.5 ** np.arange(8), atol=1e-12)
        assert series.residuals["discarded_tail"] > 0


class TestCombine:
    def test_rational_common_denominator(self):
        f = RationalFunction([1.0], [1.0, -0.5])
        g = RationalFunction([0.0, 1.0], [1.0, 0.25])
        h = combine([2.0, 1j], [f, g])
        z = np.array([0.0, 0.3, -0.4j])
        assert np.allclose(h.evaluate(z), 2.0 * f.evaluate(z) + 1j * g.evaluate(z))

    def test_shared_denominator_kept(self):
        f = RationalFunction([1.0], [1.0, -0.5])
        g = RationalFunction([0.0, 1.0], [1.0, -0.5])
        assert combine([1.0, 1.0], [f, g]).den.size == 2

    def test_taylor_combination(self):
        h = combine([1.0, -1.0], [TaylorCoeffs([1.0, 2.0]), TaylorCoeffs([1.0])])
        assert np.allclose(h.coeffs, [0.0, 2.0])

    def test_mixed_inputs_rejected(self):
        with pytest.raises(TypeError):
            combine([1.0, 1.0], [TaylorCoeffs([1.0]), RationalFunction.constant(1.0)])
