"""
Shared pytest setup for debranges-lab.

Forces the testing configuration before any project module is imported and
puts the project root on the import path.
"""
import os
import sys
from pathlib import Path

os.environ["ENVIRONMENT"] = "testing"

# Add project root to path for imports
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

import json

import pytest

from tests.fixtures.sample_data import (
    SPECS,
    half_disc_b,
    half_shift_b,
    inner_pair,
    sample_operator,
)
from utils.config import RunConfig


@pytest.fixture
def run_config():
    """RunConfig from the testing defaults with small C4 grids."""
    return RunConfig.from_config().with_overrides(theta_grid=45, psi_grid=48)


@pytest.fixture
def b_half_shift():
    return half_shift_b()


@pytest.fixture
def b_half_disc():
    return half_disc_b()


@pytest.fixture
def pair():
    return inner_pair()


@pytest.fixture
def spec_file(tmp_path):
    """Write one of the sample specs to a temporary JSON file and return its path."""

    def _write(name):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(SPECS[name]))
        return str(path)

    return _write


@pytest.fixture
def operator():
    return sample_operator()
