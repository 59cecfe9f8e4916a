"""Deterministic CSV output, config hashing and run manifests."""

import csv
import hashlib
import json
import logging
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import scipy
from pydantic import BaseModel

from ... import __version__

logger = logging.getLogger(__name__)

# not part of the experiment's meaning
NON_SEMANTIC_FIELDS = {"output", "name"}


def fmt(value: Any) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (complex, np.complexfloating)):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return str(value)


def canonical_json(config: BaseModel) -> str:
    data = config.model_dump(mode="json", exclude=NON_SEMANTIC_FIELDS)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(config: BaseModel) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    logger.debug(f"Wrote {path}")
    return path


def write_grid_csv(path: Path, x_name: str, x_values: Sequence[float], y_name: str,
                   y_values: Sequence[float], grid: np.ndarray) -> Path:
    """Heatmap layout: one row per x value, one column per y value."""
    header = [f"{x_name}\\{y_name}"] + [fmt(y) for y in y_values]
    rows = ([x] + list(grid[i]) for i, x in enumerate(x_values))
    return write_csv(path, header, rows)


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def write_manifest(path: Path, config: BaseModel, files: List[str], runtime_seconds: float,
                   extra: Dict[str, Any]) -> Path:
    payload = {
        "config": config.model_dump(mode="json"),
        "config_hash": config_hash(config),
        "tool": "orbit-scars-mcp",
        "tool_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "runtime_seconds": runtime_seconds,
        "files": sorted(files),
        **extra,
    }
    return write_json(path, payload)
