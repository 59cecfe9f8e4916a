#!/usr/bin/env python3
"""Scars MCP Server and experiment runner entry points."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from ...core.errors import ParameterError, ScarsError
from .config import ScarsConfig
from .experiments import run_experiment
from .models import EXPERIMENT_ADAPTER
from .presets import list_presets, preset_config
from .server import ScarsServer
from .services import ExperimentService, error_paths

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbit-scars", description="Embedded periodic orbits in chaotic spin chains")
    parser.add_argument("--output-root", type=Path, help="Directory for run outputs (overrides ORBIT_SCARS_OUTPUT_ROOT)")
    parser.add_argument("--workers", type=int, help="Worker processes for grid experiments")
    parser.add_argument("--log-level", help="Logging level (overrides ORBIT_SCARS_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment config file")
    run.add_argument("config", type=Path)
    preset = commands.add_parser("preset", help="Run a named preset")
    preset.add_argument("name")
    commands.add_parser("list", help="List named presets")
    validate = commands.add_parser("validate", help="Validate a config file without running it")
    validate.add_argument("config", type=Path)
    commands.add_parser("serve", help="Start the MCP server on stdio")
    return parser


def load_settings(args: argparse.Namespace) -> ScarsConfig:
    settings = ScarsConfig.from_env()
    overrides = {
        "output_root": args.output_root,
        "workers": args.workers,
        "log_level": args.log_level,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if not overrides:
        return settings
    try:
        return ScarsConfig(**{**settings.model_dump(), **overrides})
    except ValidationError as e:
        raise ParameterError(f"invalid command-line option: {e}") from e


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParameterError(f"cannot read config {path}: {e}") from e


def _print_summary(summary) -> None:
    print(summary.model_dump_json(indent=2))


def run_command(args: argparse.Namespace, settings: ScarsConfig) -> int:
    if args.command == "list":
        for info in list_presets():
            print(f"{info.name:32s} {info.experiment:18s} {info.description}")
        return 0

    if args.command == "validate":
        report = ExperimentService(settings).validate_json(_read(args.config))
        print(report.model_dump_json(indent=2))
        return 0 if report.valid else ParameterError.exit_code

    if args.command == "run":
        try:
            config = EXPERIMENT_ADAPTER.validate_json(_read(args.config))
        except ValidationError as e:
            for line in error_paths(e):
                print(f"error: {line}", file=sys.stderr)
            return ParameterError.exit_code
        summary = run_experiment(config, settings)
        _print_summary(summary)
        return summary.exit_code

    if args.command == "preset":
        summary = run_experiment(preset_config(args.name), settings)
        _print_summary(summary)
        return summary.exit_code

    if args.command == "serve":
        ScarsServer(settings).mcp.run()
        return 0

    raise ParameterError(f"unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the orbit-scars command."""
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args)
    except ScarsError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return run_command(args, settings)
    except ScarsError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


def serve():
    """Main entry point for the Scars MCP server."""
    config = ScarsConfig.from_env()
    logging.basicConfig(level=getattr(logging, config.log_level), stream=sys.stderr)

    # Create and run server
    server = ScarsServer(config)
    server.mcp.run()


if __name__ == "__main__":
    sys.exit(main())
