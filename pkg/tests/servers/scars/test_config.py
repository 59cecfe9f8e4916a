"""Tests for ScarsConfig."""

from pathlib import Path

import pytest

from orbit_scars_mcp.core.errors import ParameterError
from orbit_scars_mcp.servers.scars.config import ENV_VARS, ScarsConfig


@pytest.fixture
def clean_env(monkeypatch):
    """No ORBIT_SCARS_* variables and no .env file in the working directory."""
    for variable in ENV_VARS.values():
        monkeypatch.delenv(variable, raising=False)
    monkeypatch.setattr("orbit_scars_mcp.servers.scars.config.load_dotenv", lambda: None)
    return monkeypatch


@pytest.mark.unit
class TestScarsConfig:
    """Test ScarsConfig defaults and validation."""

    def test_defaults(self):
        config = ScarsConfig()
        assert config.output_root == Path("results")
        assert config.workers is None
        assert config.dense_cap == 2**24
        assert config.sector_cap == 8192
        assert config.log_level == "INFO"

    def test_log_level_is_case_insensitive(self):
        assert ScarsConfig(log_level="debug").log_level == "DEBUG"

    def test_rejects_unknown_fields(self):
        with pytest.raises(ValueError):
            ScarsConfig(api_token="secret")

    def test_rejects_non_positive_workers(self):
        with pytest.raises(ValueError):
            ScarsConfig(workers=0)

    def test_worker_count(self):
        assert ScarsConfig(workers=3).worker_count == 3
        assert ScarsConfig().worker_count >= 1


@pytest.mark.unit
class TestFromEnv:
    """Environment overrides."""

    def test_reads_variables(self, clean_env, tmp_path):
        clean_env.setenv("ORBIT_SCARS_OUTPUT_ROOT", str(tmp_path))
        clean_env.setenv("ORBIT_SCARS_WORKERS", "2")
        clean_env.setenv("ORBIT_SCARS_DENSE_CAP", "4096")
        clean_env.setenv("ORBIT_SCARS_LOG_LEVEL", "warning")
        config = ScarsConfig.from_env()
        assert config.output_root == tmp_path
        assert config.workers == 2
        assert config.dense_cap == 4096
        assert config.log_level == "WARNING"

    def test_empty_environment_gives_defaults(self, clean_env):
        assert ScarsConfig.from_env() == ScarsConfig()

    def test_invalid_value_names_the_variable(self, clean_env):
        clean_env.setenv("ORBIT_SCARS_SECTOR_CAP", "lots")
        with pytest.raises(ParameterError, match="ORBIT_SCARS_SECTOR_CAP"):
            ScarsConfig.from_env()
