"""Tests for ScarsServer tools."""

import pytest
import pytest_asyncio
from unittest.mock import AsyncMock

from orbit_scars_mcp.core.errors import CapacityError, ParameterError
from orbit_scars_mcp.core.reports import ConditionReport
from orbit_scars_mcp.servers.scars.config import ScarsConfig
from orbit_scars_mcp.servers.scars.models import RunSummary
from orbit_scars_mcp.servers.scars.server import ScarsServer

SSH_MODEL = {"name": "ssh", "n_sites": 6, "params": {"j_o": 1.0, "j_e": 2 / 3, "delta": 0.2, "alpha0": 0.3}}


def _tool(server: ScarsServer, name: str):
    return server.mcp._tool_manager._tools[name].fn


@pytest.mark.unit
@pytest.mark.asyncio
class TestScarsServerUnit:
    """Unit tests for ScarsServer with mocked services."""

    @pytest_asyncio.fixture
    async def mock_server(self, test_config: ScarsConfig):
        """Create ScarsServer with mocked long-running services."""
        server = ScarsServer(test_config)
        server.experiment_service.run_config = AsyncMock()
        server.experiment_service.run_preset = AsyncMock()
        server.condition_service.check = AsyncMock()
        server.leakage_service.numeric = AsyncMock()
        yield server

    async def test_tools_registered(self, mock_server: ScarsServer):
        tools = mock_server.mcp._tool_manager._tools
        assert {
            "scars_list_presets",
            "scars_validate_config",
            "scars_run_config",
            "scars_run_preset",
            "scars_check_conditions",
            "scars_leakage",
            "scars_analytic_leakage",
            "scars_minimize_jnn",
            "scars_string_order_scan",
        } <= set(tools)

    async def test_list_presets(self, mock_server: ScarsServer):
        result = await _tool(mock_server, "scars_list_presets")()
        names = [entry["name"] for entry in result]
        assert "fig2a-ssh-revival" in names
        assert names == sorted(names)

    async def test_validate_config_reports_paths(self, mock_server: ScarsServer):
        result = await _tool(mock_server, "scars_validate_config")(
            {"experiment": "leakage", "model": {"name": "ssh", "n_sites": 1}}
        )
        assert result["valid"] is False
        assert any(line.startswith("model.n_sites:") for line in result["errors"])

    async def test_validate_config_accepts(self, mock_server: ScarsServer):
        result = await _tool(mock_server, "scars_validate_config")({"experiment": "leakage", "model": SSH_MODEL})
        assert result["valid"] is True
        assert result["experiment"] == "leakage"
        assert len(result["config_hash"]) == 64

    async def test_run_config(self, mock_server: ScarsServer):
        mock_server.experiment_service.run_config.return_value = RunSummary(
            name="leakage", experiment="leakage", config_hash="abc", output_dir="/tmp/x", files=["manifest.json"]
        )
        config = {"experiment": "leakage", "model": SSH_MODEL}
        result = await _tool(mock_server, "scars_run_config")(config)
        assert result["passed"] is True
        assert result["files"] == ["manifest.json"]
        mock_server.experiment_service.run_config.assert_called_once_with(config)

    async def test_run_config_error(self, mock_server: ScarsServer):
        mock_server.experiment_service.run_config.side_effect = CapacityError("dense state", 2**30, 2**24)
        result = await _tool(mock_server, "scars_run_config")({"experiment": "leakage", "model": SSH_MODEL})
        assert "error" in result
        assert "dense state" in result["error"]

    async def test_run_preset_unknown(self, mock_server: ScarsServer):
        mock_server.experiment_service.run_preset.side_effect = ParameterError("unknown preset 'nope'")
        result = await _tool(mock_server, "scars_run_preset")("nope")
        assert result == {"error": "unknown preset 'nope'"}

    async def test_check_conditions(self, mock_server: ScarsServer):
        mock_server.condition_service.check.return_value = [
            ConditionReport(condition_id="eq7_finite", residual=0.0, threshold=1e-10)
        ]
        result = await _tool(mock_server, "scars_check_conditions")(SSH_MODEL, 0.3)
        assert result["model"] == "ssh"
        assert result["reports"][0]["verdict"] == "pass"
        spec, t, thermodynamic = mock_server.condition_service.check.call_args.args
        assert spec.n_sites == 6 and t == 0.3 and thermodynamic is False

    async def test_invalid_model_spec(self, mock_server: ScarsServer):
        result = await _tool(mock_server, "scars_check_conditions")({"name": "xy", "n_sites": 4, "boundary": "periodic"})
        assert "error" in result
        mock_server.condition_service.check.assert_not_called()

    async def test_leakage_error(self, mock_server: ScarsServer):
        mock_server.leakage_service.numeric.side_effect = ParameterError("period required")
        result = await _tool(mock_server, "scars_leakage")(SSH_MODEL)
        assert result == {"error": "period required"}

    async def test_minimize_jnn_error(self, mock_server: ScarsServer):
        result = await _tool(mock_server, "scars_minimize_jnn")(0.5, j_o=0.0)
        assert "error" in result


@pytest.mark.integration
@pytest.mark.asyncio
class TestScarsServerIntegration:
    """Tools running the real numerics at small N."""

    @pytest_asyncio.fixture
    async def server(self, test_config: ScarsConfig):
        yield ScarsServer(test_config)

    async def test_check_conditions(self, server: ScarsServer):
        result = await _tool(server, "scars_check_conditions")(SSH_MODEL, 0.4)
        assert [r["condition_id"] for r in result["reports"]][0] == "eq7_finite"
        assert all(r["verdict"] == "pass" for r in result["reports"])

    async def test_leakage(self, server: ScarsServer):
        result = await _tool(server, "scars_leakage")(SSH_MODEL, n_samples=4)
        assert len(result["gamma_inst"]) == 4
        assert result["gamma_integrated"] > 0.0

    async def test_analytic_leakage(self, server: ScarsServer):
        result = await _tool(server, "scars_analytic_leakage")(SSH_MODEL, [0.1, 0.2])
        assert len(result["gamma"]) == 2

    async def test_string_order_scan(self, server: ScarsServer):
        result = await _tool(server, "scars_string_order_scan")([0.0])
        assert result[0]["O_z"] == pytest.approx(-4 / 9, abs=1e-10)

    async def test_run_config_writes_files(self, server: ScarsServer):
        result = await _tool(server, "scars_run_config")(
            {"experiment": "string-order", "z": {"param": "z", "values": [0.5]}}
        )
        assert result["passed"] is True
        assert "string_order.csv" in result["files"]
