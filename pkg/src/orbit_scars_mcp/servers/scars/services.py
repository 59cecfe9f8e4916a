"""Service layer for Scars MCP server."""

import asyncio
from typing import Any, Dict, List

import numpy as np
from pydantic import ValidationError

from ...core.dynamics import string_order_scan
from ...core.embedding import (
    analytic_leakage_series,
    check_hamiltonian_conditions,
    integrated_jnn_leakage,
    minimize_jnn,
    numeric_leakage,
    tangent_space_residuals,
)
from ...core.orbits import AnalyticOrbit
from ...core.reports import AnalyticLeakage, ConditionReport, LeakageReport
from .config import ScarsConfig
from .experiments import EXECUTORS, TANGENT_DIM_CAP, hamiltonian_for, orbit_for, run_experiment
from .models import EXPERIMENT_ADAPTER, ModelSpec, PresetInfo, RunSummary, ValidationReport
from .presets import list_presets, preset_config
from .results import config_hash


def error_paths(error: ValidationError) -> List[str]:
    """``field.path: message`` lines; the discriminator tag is dropped from paths."""
    lines = []
    for err in error.errors():
        loc = [str(p) for p in err["loc"]]
        path = ".".join(loc[1:] if loc and loc[0] in EXECUTORS else loc)
        lines.append(f"{path or '<root>'}: {err['msg']}")
    return lines


class ExperimentService:
    """Service for validating and running experiment configs."""

    def __init__(self, config: ScarsConfig):
        self.config = config

    def list_presets(self) -> List[PresetInfo]:
        """Catalog of named presets."""
        return list_presets()

    def validate(self, config: Dict[str, Any]) -> ValidationReport:
        """Validate a config without running it."""
        try:
            parsed = EXPERIMENT_ADAPTER.validate_python(config)
        except ValidationError as e:
            return ValidationReport(valid=False, errors=error_paths(e))
        return ValidationReport(valid=True, experiment=parsed.experiment, config_hash=config_hash(parsed))

    def validate_json(self, text: str) -> ValidationReport:
        try:
            parsed = EXPERIMENT_ADAPTER.validate_json(text)
        except ValidationError as e:
            return ValidationReport(valid=False, errors=error_paths(e))
        return ValidationReport(valid=True, experiment=parsed.experiment, config_hash=config_hash(parsed))

    async def run_config(self, config: Dict[str, Any]) -> RunSummary:
        """Validate then run; numerics execute off the event loop."""
        parsed = EXPERIMENT_ADAPTER.validate_python(config)
        return await asyncio.to_thread(run_experiment, parsed, self.config)

    async def run_preset(self, name: str) -> RunSummary:
        return await asyncio.to_thread(run_experiment, preset_config(name), self.config)


class ConditionService:
    """Service for embedding certificates on a single orbit time."""

    def __init__(self, config: ScarsConfig):
        self.config = config

    def _check(self, spec: ModelSpec, t: float, thermodynamic: bool) -> List[ConditionReport]:
        h = hamiltonian_for(spec)
        orbit = orbit_for(spec)
        if thermodynamic:
            state = AnalyticOrbit(spec.name, spec.n_sites, dict(spec.params), "thermodynamic").state(t)
        else:
            state = orbit.state(t)
        reports = [check_hamiltonian_conditions(h, state, thermodynamic=thermodynamic)]
        if spec.boundary == "open" and h.dimension <= min(self.config.dense_cap, TANGENT_DIM_CAP):
            reports.append(tangent_space_residuals(h, orbit.state(t), t, cap=self.config.dense_cap))
        return reports

    async def check(self, spec: ModelSpec, t: float = 0.0, thermodynamic: bool = False) -> List[ConditionReport]:
        """Transfer-matrix verdict plus the dense tangent-space check when it fits."""
        return await asyncio.to_thread(self._check, spec, t, thermodynamic)


class LeakageService:
    """Service for numeric and closed-form leakage and the J_nn search."""

    def __init__(self, config: ScarsConfig):
        self.config = config

    def _numeric(self, spec: ModelSpec, n_samples: int) -> LeakageReport:
        h = hamiltonian_for(spec)
        orbit = orbit_for(spec)
        t_grid = (np.arange(n_samples) + 0.5) * orbit.period / n_samples
        return numeric_leakage(h.h1, orbit, t_grid, orbit.period, cap=self.config.dense_cap)

    async def numeric(self, spec: ModelSpec, n_samples: int = 20) -> LeakageReport:
        return await asyncio.to_thread(self._numeric, spec, n_samples)

    def analytic(self, spec: ModelSpec, t_samples: List[float]) -> AnalyticLeakage:
        return analytic_leakage_series(spec.name, spec.params, t_samples, spec.n_sites, spec.boundary)

    def minimize_jnn(self, j_o: float, j_e: float, n_sites: int) -> Dict[str, float]:
        best = minimize_jnn(j_o, j_e, n_sites)
        return {
            "j_o": j_o,
            "j_e": j_e,
            "n_sites": float(n_sites),
            "j_nn_opt": best,
            "gamma_at_opt": integrated_jnn_leakage(best, j_o, j_e, n_sites),
            "gamma_at_zero": integrated_jnn_leakage(0.0, j_o, j_e, n_sites),
        }


class StringOrderService:
    """Service for the AKLT string-order scan."""

    def scan(self, z_values: List[float], t: float = 0.0, start: int = 0) -> List[Dict[str, float]]:
        rows = string_order_scan(z_values, t, start)
        return [{"z": z, "O_z": value, "separation": float(sep)} for z, value, sep in rows]
