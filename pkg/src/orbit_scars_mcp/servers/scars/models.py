"""Data models for Scars MCP server: experiment configs and run records."""

from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

ModelName = Literal["ssh", "aklt", "xy", "iadecola_schecter", "cluster"]
ParamValue = Union[bool, float, str]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSpec(_Strict):
    """Which chain to build; ``params`` uses the builder keys (j_o, gamma, delta0, ...)."""
    name: ModelName
    n_sites: int = Field(ge=2)
    boundary: Literal["open", "periodic"] = "open"
    params: Dict[str, ParamValue] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _boundary_allowed(self) -> "ModelSpec":
        if self.boundary == "periodic" and self.name in ("xy", "iadecola_schecter"):
            raise ValueError(f"model {self.name} is built on open chains only")
        return self

    def number(self, key: str, default: float = 0.0) -> float:
        return float(self.params.get(key, default))


class GridAxis(_Strict):
    """Values of one swept parameter: explicit ``values`` or ``num`` points from start to stop."""
    param: str
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _one_form(self) -> "GridAxis":
        ranged = self.start is not None and self.stop is not None and self.num is not None
        if (self.values is None) == (not ranged):
            raise ValueError("give either values or start/stop/num")
        if self.values is not None and not self.values:
            raise ValueError("values must not be empty")
        return self

    def points(self) -> List[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


class WindowSpec(_Strict):
    """Time window [t0, t1] searched for the revival maximum.

    Defaults: t0 = half the orbit period, t1 = the end of the run.
    """
    t0: Optional[float] = Field(default=None, ge=0.0)
    t1: Optional[float] = None

    @model_validator(mode="after")
    def _ordered(self) -> "WindowSpec":
        if self.t0 is not None and self.t1 is not None and self.t1 < self.t0:
            raise ValueError(f"window end {self.t1} before start {self.t0}")
        return self


class IntegratorSpec(_Strict):
    method: Literal["exact", "tdvp", "analytic"] = "exact"
    dt: float = Field(default=0.025, gt=0.0)
    chi_max: int = Field(default=64, ge=1)
    check: bool = True


class OutputSpec(_Strict):
    """Where files go, relative to the configured output root unless absolute."""
    directory: Optional[Path] = None
    # final MPS as an mps-v1 document (analytic and tdvp trajectories)
    save_state: bool = False


class _Experiment(_Strict):
    name: Optional[str] = None
    seed: int = 0
    output: OutputSpec = Field(default_factory=OutputSpec)


class CheckConditionsExperiment(_Experiment):
    experiment: Literal["check-conditions"]
    models: List[ModelSpec] = Field(min_length=1)
    n_times: int = Field(default=10, ge=1)
    thermodynamic: bool = False
    h1_override: Optional[Literal["identity"]] = None


class LeakageExperiment(_Experiment):
    experiment: Literal["leakage"]
    model: ModelSpec
    n_samples: int = Field(default=20, ge=1)
    integrate: bool = True
    compare_analytic: bool = True
    max_rel_residual: Optional[float] = Field(default=None, gt=0.0)
    candidates: Optional[GridAxis] = None
    cancel_tol: float = Field(default=1e-10, gt=0.0)


class TrajectoryExperiment(_Experiment):
    experiment: Literal["trajectory"]
    model: ModelSpec
    integrator: IntegratorSpec = Field(default_factory=IntegratorSpec)
    window: WindowSpec = Field(default_factory=WindowSpec)
    t_final: Optional[float] = Field(default=None, gt=0.0)
    hamiltonian: Literal["full", "h0", "static"] = "full"
    track_orbit: bool = False
    min_fidelity: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    min_orbit_overlap: Optional[float] = Field(default=None, gt=0.0, le=1.0)


class RevivalScanExperiment(_Experiment):
    experiment: Literal["revival-scan"]
    model: ModelSpec
    x: GridAxis
    y: Optional[GridAxis] = None
    integrator: IntegratorSpec = Field(default_factory=IntegratorSpec)
    window: WindowSpec = Field(default_factory=WindowSpec)


class FidelityDensityExperiment(_Experiment):
    experiment: Literal["fidelity-density"]
    model: ModelSpec
    sizes: List[int] = Field(min_length=1)
    sweep: GridAxis
    integrator: IntegratorSpec = Field(default_factory=IntegratorSpec)
    window: WindowSpec = Field(default_factory=WindowSpec)


class FloquetStatsExperiment(_Experiment):
    experiment: Literal["floquet-stats"]
    model: ModelSpec
    symmetries: List[str] = Field(default_factory=list)
    pinned: Dict[str, float] = Field(default_factory=dict)
    factor_symmetry: Optional[str] = None
    dt: Optional[float] = Field(default=None, gt=0.0)
    require_factorization: Optional[bool] = None
    r_range: Optional[List[float]] = Field(default=None, min_length=2, max_length=2)
    min_quasi_degenerate_ratio: Optional[float] = Field(default=None, gt=0.0)


class ScarModesExperiment(_Experiment):
    experiment: Literal["scar-modes"]
    model: ModelSpec
    symmetries: List[str] = Field(default_factory=list)
    pinned: Dict[str, float] = Field(default_factory=dict)
    n_tower: int = Field(default=4, ge=0)
    dt: Optional[float] = Field(default=None, gt=0.0)
    min_orbit_return: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    max_tower_median: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class StringOrderExperiment(_Experiment):
    experiment: Literal["string-order"]
    z: GridAxis
    t: float = 0.0
    start: int = Field(default=0, ge=0)
    o_z_tolerance: Optional[float] = Field(default=None, gt=0.0)


class JnnOptimizeExperiment(_Experiment):
    experiment: Literal["jnn-optimize"]
    j_o: float = Field(default=1.0, gt=0.0)
    j_e: GridAxis
    n_sites: int = Field(default=20, ge=4)


ExperimentConfig = Annotated[
    Union[
        CheckConditionsExperiment,
        LeakageExperiment,
        TrajectoryExperiment,
        RevivalScanExperiment,
        FidelityDensityExperiment,
        FloquetStatsExperiment,
        ScarModesExperiment,
        StringOrderExperiment,
        JnnOptimizeExperiment,
    ],
    Field(discriminator="experiment"),
]

EXPERIMENT_ADAPTER: TypeAdapter = TypeAdapter(ExperimentConfig)


class PresetInfo(BaseModel):
    """Catalog entry of a named experiment."""
    name: str
    experiment: str
    description: str


class ValidationReport(BaseModel):
    valid: bool
    experiment: Optional[str] = None
    config_hash: Optional[str] = None
    errors: List[str] = Field(default_factory=list)


class RunSummary(BaseModel):
    """Outcome of one experiment run."""
    name: str
    experiment: str
    config_hash: str
    output_dir: str
    files: List[str] = Field(default_factory=list)
    passed: bool = True
    exit_code: int = 0
    runtime_seconds: float = 0.0
    metrics: Dict[str, float] = Field(default_factory=dict)
    messages: List[str] = Field(default_factory=list)
