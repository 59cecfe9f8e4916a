"""Test configuration and fixtures."""

from pathlib import Path
from typing import Dict

import pytest
from dotenv import load_dotenv

from orbit_scars_mcp.servers.scars.config import ScarsConfig


# Load environment variables from .env file
load_dotenv()


@pytest.fixture
def test_config(tmp_path: Path) -> ScarsConfig:
    """Runner configuration writing into a temporary output root."""
    return ScarsConfig(output_root=tmp_path / "results", workers=1)


@pytest.fixture
def ssh_driven_params() -> Dict[str, float]:
    """Driven SSH parameters on the cancellation line alpha0 = (J_e + delta) / 2."""
    return {"j_o": 1.0, "j_e": 2 / 3, "delta": 0.2, "alpha0": (2 / 3 + 0.2) / 2}


@pytest.fixture
def aklt_driven_params() -> Dict[str, float]:
    """AKLT drive Delta(t) = 2 gamma cos 4t."""
    return {"gamma": 0.1, "delta0": 0.2}


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests (full experiment runs)"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
