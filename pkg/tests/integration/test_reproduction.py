"""
Reproductions of the worked examples.
"""
import numpy as np
import pytest

from core.exceptions import ExtremeInput
from core.hardy import TaylorCoeffs
from services.reproduction import example_4, example_4_pair, question8, section_8
from tests.fixtures.sample_data import half_shift_b


@pytest.mark.slow
def test_example_4_has_no_outer_combination(run_config):
    result = example_4(run_config)
    assert result["name"] == "example-4"
    assert result["all_c4_fail"]
    for case in result["cases"]:
        assert case["small_alpha"]["counts"] == [2]
        assert case["large_alpha"]["counts"] == [1]
        assert case["unimodular_half_radius"]["all_at_least_one"]
        assert case["c4"]["min_zero_count"] >= 1


def test_example_4_pair_is_star_inner():
    phi1, phi2 = example_4_pair(0.05)
    z = np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.allclose(np.abs(phi1.evaluate(z)) ** 2 + np.abs(phi2.evaluate(z)) ** 2, 1.0)


def test_section_8_recovers_unitary(run_config):
    result = section_8(run_config)
    assert result["closed_form_coincidence"]["coincide"]
    assert result["tau_prime_error"] < 1e-3
    assert result["b2_reconstruction_error"] < 1e-3
    alpha = complex(*result["completion"]["alpha"])
    beta = complex(*result["completion"]["beta"])
    assert np.isclose(abs(alpha) ** 2 + abs(beta) ** 2, 1.0)
    assert {"computed_coincidence", "computed_tau_prime_error", "computed_within_bound"} <= set(result)


@pytest.mark.slow
def test_section_8_computed_coincidence(run_config):
    config = run_config.with_overrides(truncation=256, grid_size=4096)
    result = section_8(config)
    assert result["computed_coincidence"]["residual"] < 1e-2
    assert result["computed_within_bound"] is True
    assert result["computed_tau_prime_error"] < 5e-2
    assert result["tau_prime_error"] < 1e-2


class TestQuestion8:
    def test_rational_scan(self, run_config):
        result = question8(half_shift_b(), run_config, theta_grid=20, psi_grid=16)
        assert result["heuristic"] is False
        assert result["beta_zero_outer"]
        assert result["outer_cells_beta_nonzero"] > 0
        assert len(result["cells"]) <= 50

    def test_taylor_scan_is_heuristic(self, run_config):
        b = TaylorCoeffs([0.0, 0.5])
        result = question8(b, run_config, theta_grid=6, psi_grid=4)
        assert result["heuristic"] is True
        assert result["beta_zero_outer"]

    def test_extreme_taylor(self, run_config):
        with pytest.raises(ExtremeInput):
            question8(TaylorCoeffs([0.0, 1.0]), run_config, theta_grid=4, psi_grid=4)
