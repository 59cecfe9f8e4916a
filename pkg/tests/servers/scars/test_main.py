"""Tests for the orbit-scars command line."""

import json

import pytest

from orbit_scars_mcp.servers.scars.config import ENV_VARS
from orbit_scars_mcp.servers.scars.main import build_parser, main


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    for variable in ENV_VARS.values():
        monkeypatch.delenv(variable, raising=False)
    monkeypatch.setattr("orbit_scars_mcp.servers.scars.config.load_dotenv", lambda: None)
    monkeypatch.setenv("ORBIT_SCARS_OUTPUT_ROOT", str(tmp_path / "results"))


def _write(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return path


@pytest.mark.unit
class TestParser:
    """Argument parsing."""

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_global_options(self):
        args = build_parser().parse_args(["--workers", "2", "preset", "ssh-jnn-optimum"])
        assert args.workers == 2
        assert args.command == "preset"
        assert args.name == "ssh-jnn-optimum"


@pytest.mark.unit
class TestCommands:
    """Exit codes and printed output."""

    def test_list(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "fig2a-ssh-revival" in out
        assert "conditions-identity-control" in out

    def test_validate_good_config(self, tmp_path, capsys):
        path = _write(tmp_path, {"experiment": "string-order", "z": {"param": "z", "values": [0.0]}})
        assert main(["validate", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] is True
        assert report["experiment"] == "string-order"

    def test_validate_bad_config(self, tmp_path, capsys):
        path = _write(tmp_path, {"experiment": "leakage", "model": {"name": "ssh", "n_sites": 6, "colour": 1}})
        assert main(["validate", str(path)]) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] is False
        assert any(line.startswith("model.colour:") for line in report["errors"])

    def test_run_invalid_config_prints_paths(self, tmp_path, capsys):
        path = _write(tmp_path, {"experiment": "jnn-optimize", "j_e": {"param": "j_e"}})
        assert main(["run", str(path)]) == 1
        err = capsys.readouterr().err
        assert "error: j_e:" in err

    def test_run_missing_file(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.json")]) == 1
        assert "cannot read config" in capsys.readouterr().err

    def test_unknown_preset(self, capsys):
        assert main(["preset", "no-such-preset"]) == 1
        assert "unknown preset" in capsys.readouterr().err

    def test_invalid_environment(self, monkeypatch, capsys):
        monkeypatch.setenv("ORBIT_SCARS_WORKERS", "many")
        assert main(["list"]) == 1
        assert "ORBIT_SCARS_WORKERS" in capsys.readouterr().err

    def test_invalid_option(self, capsys):
        assert main(["--workers", "0", "list"]) == 1
        assert "invalid command-line option" in capsys.readouterr().err


@pytest.mark.integration
class TestRun:
    """End-to-end runs through the command line."""

    def test_run_config(self, tmp_path, capsys):
        path = _write(tmp_path, {"experiment": "string-order", "z": {"param": "z", "values": [0.0, 0.5]}})
        assert main(["--output-root", str(tmp_path / "out"), "run", str(path)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["passed"] is True
        assert summary["output_dir"].startswith(str(tmp_path / "out"))
        assert (tmp_path / "out").is_dir()

    def test_failing_run_exits_3(self, tmp_path, capsys):
        path = _write(
            tmp_path,
            {
                "experiment": "check-conditions",
                "models": [{"name": "ssh", "n_sites": 6, "params": {"j_e": 2 / 3, "delta": 0.2, "alpha0": 0.3}}],
                "n_times": 1,
                "h1_override": "identity",
            },
        )
        assert main(["run", str(path)]) == 3
        assert json.loads(capsys.readouterr().out)["passed"] is False
