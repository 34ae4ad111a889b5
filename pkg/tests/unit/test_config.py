"""
Tests for the configuration classes and the run configuration.
"""
import pytest

from config import get_config
from config.base_config import BaseConfig
from config.dev_config import DevelopmentConfig
from config.prod_config import ProductionConfig, apply_logging_config
from config.test_config import TestingConfig
from core.tolerances import DEFAULT_TOLERANCES, Tolerances
from utils.config import RunConfig


class TestConfigClasses:
    def test_environment_selects_class(self, monkeypatch):
        monkeypatch.setenv("ENVIRONMENT", "testing")
        assert get_config() is TestingConfig
        monkeypatch.setenv("ENVIRONMENT", "dev")
        assert get_config() is DevelopmentConfig

    def test_explicit_environment_name(self):
        assert get_config("Test") is TestingConfig

    def test_production_keeps_larger_grids(self):
        assert ProductionConfig.TRUNCATION >= TestingConfig.TRUNCATION

    def test_logging_config_fallback(self, tmp_path):
        assert apply_logging_config(str(tmp_path / "missing.json")) is False

    def test_testing_defaults(self):
        assert TestingConfig.TRUNCATION == 64
        assert TestingConfig.GRID_SIZE == 1024
        assert TestingConfig.C4_THETA_GRID == 90
        assert TestingConfig.validate()

    def test_validate_reports_problems(self, monkeypatch):
        monkeypatch.setattr(BaseConfig, "TRUNCATION", 100)
        with pytest.raises(ValueError, match="power of two"):
            BaseConfig.validate()

    def test_summary(self):
        summary = TestingConfig.get_config_summary()
        assert summary["app_name"] == "debranges-lab"
        assert summary["c4_grid"] == [90, 90]


class TestRunConfig:
    def test_from_config(self):
        rc = RunConfig.from_config(TestingConfig)
        assert rc.truncation == 64
        assert rc.tol("coincide") == 1e-6
        assert rc.tolerances is not TestingConfig.TOLERANCES

    def test_overrides(self):
        rc = RunConfig.from_config(TestingConfig)
        changed = rc.with_overrides(["coincide=1e-4"], truncation=32, seed=None)
        assert changed.tol("coincide") == 1e-4
        assert changed.truncation == 32
        assert changed.seed == rc.seed
        assert rc.tol("coincide") == 1e-6

    @pytest.mark.parametrize("item", ["coincide", "=1e-3", "nonsense=1e-3", "coincide=abc"])
    def test_bad_overrides(self, item):
        with pytest.raises(ValueError):
            RunConfig.from_config(TestingConfig).with_overrides([item])

    def test_validate(self):
        rc = RunConfig.from_config(TestingConfig)
        assert rc.validate() is rc
        with pytest.raises(ValueError, match="truncation"):
            rc.with_overrides(truncation=100).validate()
        with pytest.raises(ValueError, match="format"):
            rc.with_overrides(format="xml").validate()
        with pytest.raises(ValueError, match="positive"):
            rc.with_overrides(["stability=0"]).validate()

    def test_signed_threshold_allowed(self):
        rc = RunConfig.from_config(TestingConfig)
        assert rc.tol("extremality_threshold") < 0
        rc.validate()

    def test_to_dict(self):
        assert RunConfig.from_config(TestingConfig).to_dict()["grid_size"] == 1024

    def test_numerics(self):
        rc = RunConfig.from_config(TestingConfig).with_overrides(["defect_rank=0.5", "near_boundary=0.9"])
        tols = rc.numerics()
        assert isinstance(tols, Tolerances)
        assert tols.defect_rank == 0.5
        assert tols.near_boundary == 0.9
        assert tols.kernel == DEFAULT_TOLERANCES.kernel
        assert tols.extremality() == {"floor": 1e-14, "threshold": -25.0, "clip_limit": 0.02}


class TestTolerances:
    def test_defaults_match_config(self):
        assert BaseConfig.TOLERANCES == DEFAULT_TOLERANCES.to_dict()
        assert set(Tolerances.names()) == set(BaseConfig.TOLERANCES)

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="bogus"):
            Tolerances.from_mapping({"bogus": 1.0})

    def test_partial_mapping_keeps_defaults(self):
        tols = Tolerances.from_mapping({"coincide": "1e-3"})
        assert tols.coincide == 1e-3
        assert tols.svd_cutoff == DEFAULT_TOLERANCES.svd_cutoff
