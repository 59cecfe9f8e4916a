"""Report records produced by the numerics and consumed by the runner."""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

ConditionId = Literal[
    "eq3_H0_closure",
    "eq4_nontrivial",
    "eq5_tangent_annihilation",
    "eq7_finite",
    "eq8_thermo",
]


class ConditionReport(BaseModel):
    """Verdict of one embedding condition.

    ``mode="at_most"`` passes when residual <= threshold; ``"greater_than"``
    passes when residual > threshold (the non-eigenstate requirement).
    """

    condition_id: ConditionId
    residual: float
    threshold: float
    mode: Literal["at_most", "greater_than"] = "at_most"
    verdict: Literal["pass", "fail"] = "fail"
    details: Dict[str, float] = Field(default_factory=dict)
    sub_reports: List["ConditionReport"] = Field(default_factory=list)

    @model_validator(mode="after")
    def _set_verdict(self) -> "ConditionReport":
        if self.mode == "at_most":
            ok = self.residual <= self.threshold
        else:
            ok = self.residual > self.threshold
        self.verdict = "pass" if ok else "fail"
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def all_passed(self) -> bool:
        return self.passed and all(r.all_passed for r in self.sub_reports)


class LeakageReport(BaseModel):
    t_samples: List[float]
    gamma_inst: List[float]
    gamma_integrated: float
    period: float
    analytic_gamma: Optional[List[float]] = None
    max_abs_residual: Optional[float] = None
    max_rel_residual: Optional[float] = None

    @model_validator(mode="after")
    def _non_negative(self) -> "LeakageReport":
        if any(g < 0 for g in self.gamma_inst) or self.gamma_integrated < 0:
            raise ValueError("leakage samples must be non-negative")
        return self


class AnalyticLeakage(BaseModel):
    model: str
    t_samples: List[float]
    gamma: List[float]
    proportional: bool = False
    note: str = ""


class FloquetSpectrum(BaseModel):
    sector: str
    phases: List[float]
    spacings: List[float]
    r_values: List[float]
    r_mean: float
    histogram: List[float]
    bin_edges: List[float]
    quasi_degenerate_fraction: float


class FactorizationCertificate(BaseModel):
    model: str
    identity: Literal["U_T=(X*U_a)^2", "U_T=(R*U_a)^2", "U_T=z(Z4*U_a)^2", "U_T=(S*U_a)^2"]
    symmetry: str
    residual: float
    prefactor: float = 1.0
    holds: bool = False

    @model_validator(mode="after")
    def _set_holds(self) -> "FactorizationCertificate":
        self.holds = self.residual <= 1e-8
        return self


class ScarModeOverlap(BaseModel):
    label: str
    return_probability: float
    outside_weight: float


class FidelitySummary(BaseModel):
    f_max: float
    t_star: float
    window: List[float]
    fidelity_density: float
