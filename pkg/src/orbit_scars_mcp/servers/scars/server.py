"""Scars MCP Server implementation with layered architecture."""

from typing import Any, Dict, List, Optional

from fastmcp import FastMCP
from pydantic import ValidationError

from ...core.errors import ScarsError
from .config import ScarsConfig
from .models import ModelSpec
from .services import (
    ConditionService,
    ExperimentService,
    LeakageService,
    StringOrderService,
)


class ScarsServer:
    """Scars MCP Server with layered architecture."""

    def __init__(self, config: ScarsConfig):
        self.config = config
        self.mcp: FastMCP = FastMCP("Orbit Scars Server")

        # Initialize services
        self.experiment_service = ExperimentService(config)
        self.condition_service = ConditionService(config)
        self.leakage_service = LeakageService(config)
        self.string_order_service = StringOrderService()

        self._setup_tools()

    def _setup_tools(self):
        """Set up MCP tools organized by category."""
        self._setup_experiment_tools()
        self._setup_condition_tools()
        self._setup_leakage_tools()
        self._setup_string_order_tools()

    def _setup_experiment_tools(self):
        """Set up preset and config-run tools."""

        @self.mcp.tool()
        async def scars_list_presets() -> List[Dict[str, Any]]:
            """List the named experiment presets."""
            return [p.model_dump() for p in self.experiment_service.list_presets()]

        @self.mcp.tool()
        async def scars_validate_config(config: Dict[str, Any]) -> Dict[str, Any]:
            """Validate an experiment config without running it.

            Args:
                config: Experiment config; the "experiment" key selects its kind
            """
            return self.experiment_service.validate(config).model_dump()

        @self.mcp.tool()
        async def scars_run_config(config: Dict[str, Any]) -> Dict[str, Any]:
            """Run an experiment config and write its result files.

            Args:
                config: Experiment config; the "experiment" key selects its kind
            """
            try:
                summary = await self.experiment_service.run_config(config)
                return summary.model_dump()
            except (ScarsError, ValidationError) as e:
                return {"error": str(e)}

        @self.mcp.tool()
        async def scars_run_preset(name: str) -> Dict[str, Any]:
            """Run a named preset.

            Args:
                name: Preset name (see scars_list_presets)
            """
            try:
                summary = await self.experiment_service.run_preset(name)
                return summary.model_dump()
            except ScarsError as e:
                return {"error": str(e)}

    def _setup_condition_tools(self):
        """Set up embedding-condition tools."""

        @self.mcp.tool()
        async def scars_check_conditions(model: Dict[str, Any], t: float = 0.0,
                                         thermodynamic: bool = False) -> Dict[str, Any]:
            """Check the embedding conditions of a model on its orbit state at time t.

            Args:
                model: Model spec with name, n_sites, boundary and params
                t: Orbit time of the checked state
                thermodynamic: Use the infinite-chain transfer-matrix criterion
            """
            try:
                spec = ModelSpec.model_validate(model)
                reports = await self.condition_service.check(spec, t, thermodynamic)
                return {"model": spec.name, "reports": [r.model_dump() for r in reports]}
            except (ScarsError, ValidationError) as e:
                return {"error": str(e)}

    def _setup_leakage_tools(self):
        """Set up leakage tools."""

        @self.mcp.tool()
        async def scars_leakage(model: Dict[str, Any], n_samples: int = 20) -> Dict[str, Any]:
            """Numeric leakage ||(1 - P) H1 |psi(t)>|| sampled over one orbit period.

            Args:
                model: Model spec with name, n_sites, boundary and params
                n_samples: Number of midpoint samples over the period
            """
            try:
                spec = ModelSpec.model_validate(model)
                report = await self.leakage_service.numeric(spec, n_samples)
                return report.model_dump()
            except (ScarsError, ValidationError) as e:
                return {"error": str(e)}

        @self.mcp.tool()
        async def scars_analytic_leakage(model: Dict[str, Any], t_samples: List[float]) -> Dict[str, Any]:
            """Closed-form leakage at the given times.

            Args:
                model: Model spec with name, n_sites, boundary and params
                t_samples: Times at which to evaluate
            """
            try:
                spec = ModelSpec.model_validate(model)
                return self.leakage_service.analytic(spec, t_samples).model_dump()
            except (ScarsError, ValidationError) as e:
                return {"error": str(e)}

        @self.mcp.tool()
        async def scars_minimize_jnn(j_e: float, j_o: float = 1.0, n_sites: int = 20) -> Dict[str, Any]:
            """Next-next-nearest SSH coupling minimizing the integrated leakage.

            Args:
                j_e: Even-bond coupling
                j_o: Odd-bond coupling, sets the period pi / j_o
                n_sites: Chain length in the leakage prefactor
            """
            try:
                return self.leakage_service.minimize_jnn(j_o, j_e, n_sites)
            except ScarsError as e:
                return {"error": str(e)}

    def _setup_string_order_tools(self):
        """Set up AKLT string-order tools."""

        @self.mcp.tool()
        async def scars_string_order_scan(z_values: List[float], t: float = 0.0,
                                          start: Optional[int] = None) -> List[Dict[str, float]]:
            """Converged AKLT string order O^z for each orbit parameter z.

            Args:
                z_values: Orbit parameters to scan
                t: Orbit time
                start: First site of the string (default 0)
            """
            return self.string_order_service.scan(z_values, t, start or 0)
