"""Configuration models for Scars MCP Server."""

import os
from pathlib import Path
from typing import Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ...core.errors import ParameterError

ENV_VARS = {
    "output_root": "ORBIT_SCARS_OUTPUT_ROOT",
    "workers": "ORBIT_SCARS_WORKERS",
    "dense_cap": "ORBIT_SCARS_DENSE_CAP",
    "sector_cap": "ORBIT_SCARS_SECTOR_CAP",
    "log_level": "ORBIT_SCARS_LOG_LEVEL",
}


class ScarsConfig(BaseModel):
    """Configuration for Scars MCP Server and the experiment runner."""

    model_config = ConfigDict(extra="forbid")

    output_root: Path = Path("results")
    workers: Optional[int] = Field(default=None, gt=0)
    dense_cap: int = Field(default=2**24, gt=0)
    sector_cap: int = Field(default=8192, gt=0)
    eig_cap: int = Field(default=4096, gt=0)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper(cls, value: object) -> object:
        return value.upper() if isinstance(value, str) else value

    @property
    def worker_count(self) -> int:
        return self.workers or os.cpu_count() or 1

    @classmethod
    def from_env(cls) -> "ScarsConfig":
        """Read ORBIT_SCARS_* variables, after loading a local .env file."""
        load_dotenv()
        values = {}
        for field_name, variable in ENV_VARS.items():
            raw = os.getenv(variable)
            if raw:
                values[field_name] = raw
        try:
            return cls(**values)
        except ValidationError as e:
            bad = {ENV_VARS[str(err["loc"][0])] for err in e.errors() if err["loc"] and str(err["loc"][0]) in ENV_VARS}
            raise ParameterError(f"invalid environment value for {', '.join(sorted(bad)) or 'ORBIT_SCARS_*'}: {e}") from e
